#include "mevir/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mevir/api.hpp"
#include "mevir/dot.hpp"
#include "mevir/error.hpp"
#include "mevir/recommend.hpp"
#include "mevir/service.hpp"
#include "mevir/version.hpp"

namespace mevir {

namespace {

struct Options {
    std::string bundle;
    std::string output;
    std::string claim, profile, policy, lattice, session, state, info, topic, text, file, lexicon;
    std::string format = "dot";
    std::string host = "127.0.0.1";
    std::size_t budget = 1;
    std::size_t k = kDefaultRecommendK;
    double min_reputation = kDefaultMinReputation;
    std::uint64_t revision = 0;
    int port = 8080;
    bool trace = false;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string bundle_path(const Options& o) {
    if (!o.bundle.empty()) return o.bundle;
    if (const char* env = std::getenv("MEVIR_BUNDLE"); env && *env) return env;
    throw CLI::RequiredError("--bundle (or MEVIR_BUNDLE)");
}

std::optional<std::string> opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

void write_output(const Options& o, const std::string& text, std::ostream& out) {
    if (o.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw DataError(o.output, "cannot write file");
    f << text;
}

int cmd_elaborate(const Options& o, std::ostream& out) {
    const auto bundle = load_bundle(bundle_path(o));
    if (o.budget < 1) throw DataError("--budget", "budget must be at least 1");
    const auto lattice = elaborate(bundle.corpus, o.claim, bundle.profile(o.profile), bundle.policy(o.policy),
                                   bundle.sources, Budget{o.budget});
    write_output(o, dump_canonical(to_json(lattice)), out);
    return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const auto bundle = load_bundle(bundle_path(o));
    const auto binding = bind_lattice(bundle, o.lattice, opt(o.profile), opt(o.policy));
    write_output(o, dump_canonical(evaluation_payload(bundle, binding, o.trace)), out);
    return 0;
}

int cmd_footprint(const Options& o, std::ostream& out) {
    const auto lexicon = load_lexicon_tsv(o.lexicon);
    const std::string text = o.file.empty() ? o.text : read_text(o.file);
    write_output(o, dump_canonical(footprint_payload(compute_footprint(text, lexicon))), out);
    return 0;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
    const auto bundle = load_bundle(bundle_path(o));
    write_output(o, dump_canonical(diagnosis_payload(bundle, o.session, opt(o.lattice))), out);
    return 0;
}

int cmd_revise(const Options& o, std::ostream& out) {
    auto bundle = load_bundle(bundle_path(o));
    const auto info = new_information_from_json(parse_json_text(read_text(o.info), o.info), "");
    bundle.state(o.state);
    auto& state = bundle.states.at(o.state);
    if (!bundle.sources.contains(info.source_id)) {
        throw DataError("/source_id", "dangling reference to source '" + info.source_id + "'");
    }
    const RevisionContext ctx{bundle.profile(state.profile_id), bundle.sources, bundle.policy(state.policy_id),
                              bundle.lexicon.lexicon};
    state = revise(state, info, ctx);
    write_output(o, emit_bundle(bundle), out);
    return 0;
}

int cmd_reinstate(const Options& o, std::ostream& out) {
    auto bundle = load_bundle(bundle_path(o));
    bundle.state(o.state);
    auto& state = bundle.states.at(o.state);
    const RevisionContext ctx{bundle.profile(state.profile_id), bundle.sources, bundle.policy(state.policy_id),
                              bundle.lexicon.lexicon};
    state = reinstate(state, o.revision, ctx);
    write_output(o, emit_bundle(bundle), out);
    return 0;
}

int cmd_recommend(const Options& o, std::ostream& out) {
    const auto bundle = load_bundle(bundle_path(o));
    write_output(o, dump_canonical(recommend_payload(bundle, o.topic, o.k, o.min_reputation)), out);
    return 0;
}

int cmd_export(const Options& o, std::ostream& out) {
    const auto bundle = load_bundle(bundle_path(o));
    const auto binding = bind_lattice(bundle, o.lattice, opt(o.profile), opt(o.policy));
    const auto result =
        evaluate(*binding.lattice, *binding.profile, bundle.sources, *binding.policy, bundle.lexicon.lexicon);
    write_output(o, export_dot(*binding.lattice, result), out);
    return 0;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
    ServiceOptions so{opt(o.profile), opt(o.policy)};
    Service service(load_bundle(bundle_path(o)), so);
    out << "serving on http://" << o.host << ":" << o.port << "\n" << std::flush;
    if (!run_http(service, o.host, o.port)) {
        err << "error: cannot listen on " << o.host << ":" << o.port << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trust-lattice decision support engine", "mevir"};
    app.set_version_flag("--version", kEngineVersion);
    app.require_subcommand(1);
    Options o;

    auto bundle_opt = [&](CLI::App* sub) { sub->add_option("--bundle", o.bundle, "Bundle JSON (default: $MEVIR_BUNDLE)"); };
    auto output_opt = [&](CLI::App* sub) { sub->add_option("-o,--output", o.output, "Write output to a file"); };

    auto* elab = app.add_subcommand("elaborate", "Build a trust lattice for a claim");
    bundle_opt(elab);
    elab->add_option("--claim", o.claim)->required();
    elab->add_option("--profile", o.profile)->required();
    elab->add_option("--policy", o.policy)->required();
    elab->add_option("--budget", o.budget, "Maximum node expansions")->required()->check(CLI::PositiveNumber);
    output_opt(elab);

    auto* eval = app.add_subcommand("evaluate", "Score a lattice");
    bundle_opt(eval);
    eval->add_option("--lattice", o.lattice)->required();
    eval->add_option("--profile", o.profile);
    eval->add_option("--policy", o.policy);
    eval->add_flag("--trace", o.trace, "Include per-node support/attack breakdown");
    output_opt(eval);

    auto* fp = app.add_subcommand("footprint", "Moral foundation footprint of a text");
    auto* text_opt = fp->add_option("--text", o.text);
    auto* file_opt = fp->add_option("--file", o.file)->check(CLI::ExistingFile);
    text_opt->excludes(file_opt);
    fp->add_option("--lexicon", o.lexicon, "Lexicon TSV")->required();
    output_opt(fp);

    auto* diag = app.add_subcommand("diagnose", "Bias flags for a session");
    bundle_opt(diag);
    diag->add_option("--session", o.session)->required();
    diag->add_option("--lattice", o.lattice);
    output_opt(diag);

    auto* rev = app.add_subcommand("revise", "Integrate new information into a state");
    bundle_opt(rev);
    rev->add_option("--state", o.state)->required();
    rev->add_option("--info", o.info, "NewInformation JSON")->required()->check(CLI::ExistingFile);
    output_opt(rev);

    auto* rein = app.add_subcommand("reinstate", "Undo an applied revision");
    bundle_opt(rein);
    rein->add_option("--state", o.state)->required();
    rein->add_option("--revision", o.revision)->required();
    output_opt(rein);

    auto* rec = app.add_subcommand("recommend", "Diverse credible authorities for a topic");
    bundle_opt(rec);
    rec->add_option("--topic", o.topic)->required();
    rec->add_option("-k", o.k)->check(CLI::PositiveNumber);
    rec->add_option("--min-reputation", o.min_reputation)->check(CLI::Range(0.0, 1.0));
    output_opt(rec);

    auto* exp = app.add_subcommand("export", "Render a lattice");
    bundle_opt(exp);
    exp->add_option("--lattice", o.lattice)->required();
    exp->add_option("--format", o.format)->check(CLI::IsMember({"dot"}));
    exp->add_option("--profile", o.profile);
    exp->add_option("--policy", o.policy);
    output_opt(exp);

    auto* srv = app.add_subcommand("serve", "Run the JSON API");
    bundle_opt(srv);
    srv->add_option("--port", o.port)->check(CLI::Range(0, 65535));
    srv->add_option("--host", o.host);
    srv->add_option("--profile", o.profile, "Profile for lattices without a state");
    srv->add_option("--policy", o.policy, "Policy for lattices without a state");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (fp->parsed() && !text_opt->count() && !file_opt->count()) {
            throw CLI::RequiredError("--text or --file");
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kEngineVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (elab->parsed()) return cmd_elaborate(o, out);
        if (eval->parsed()) return cmd_evaluate(o, out);
        if (fp->parsed()) return cmd_footprint(o, out);
        if (diag->parsed()) return cmd_diagnose(o, out);
        if (rev->parsed()) return cmd_revise(o, out);
        if (rein->parsed()) return cmd_reinstate(o, out);
        if (rec->parsed()) return cmd_recommend(o, out);
        if (exp->parsed()) return cmd_export(o, out);
        if (srv->parsed()) return cmd_serve(o, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace mevir
