// Serial vs OpenMP timings for the three parallel kernels.
//   mevir_bench [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "gen.hpp"
#include "mevir/error.hpp"
#include "mevir/moral.hpp"
#include "mevir/revision.hpp"

using namespace mevir;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   x%.2f\n", name, serial, parallel, serial / parallel);
}

// Wide, shallow lattice so each height level has plenty of nodes.
void bench_evaluation(int repeats) {
    gen::Rng rng(1);
    auto w = gen::random_world(rng);
    w.policy.lambda = 0.5;
    gen::LatticeShape shape;
    shape.min_nodes = 4000;
    shape.max_nodes = 4000;
    shape.extra_edge_chance = 0.0005;
    const auto l = gen::random_lattice(rng, w, shape);
    const LatticeEvaluator serial(l, w.profile, w.sources, w.policy, w.lexicon, Execution::serial);
    const LatticeEvaluator parallel(l, w.profile, w.sources, w.policy, w.lexicon, Execution::parallel);
    EvaluationResult a, b;
    const double ts = best_of(repeats, [&] { a = serial.evaluate(); });
    const double tp = best_of(repeats, [&] { b = parallel.evaluate(); });
    if (!(a == b)) std::printf("  evaluation results differ\n");
    report("evaluation (4000 nodes)", ts, tp);
}

void bench_footprints(int repeats) {
    gen::Rng rng(2);
    const auto lexicon = gen::random_lexicon(rng, 60);
    std::vector<std::string> texts;
    for (int i = 0; i < 20000; ++i) texts.push_back(gen::random_text(rng, 60));
    std::vector<Footprint> a, b;
    const double ts = best_of(repeats, [&] { a = compute_footprints_serial(texts, lexicon); });
    const double tp = best_of(repeats, [&] { b = compute_footprints(texts, lexicon); });
    if (a != b) std::printf("  footprints differ\n");
    report("footprints (20000 texts)", ts, tp);
}

void bench_retraction(int repeats) {
    gen::Rng rng(3);
    for (int attempt = 0; attempt < 5000; ++attempt) {
        auto w = gen::random_world(rng);
        const auto inst = gen::random_revision(rng, w);
        RevisionEntry scratch;
        const auto merged = merge_information(inst.lattice, inst.info, scratch);
        const auto r = evaluate(merged, w.profile, w.sources, w.policy, w.lexicon);
        const auto conflicts = find_contradictions(r, merged);
        const LatticeEvaluator ev(merged, w.profile, w.sources, w.policy, w.lexicon);
        const auto n = retraction_candidates(merged, conflicts, ev).size();
        if (n < 13 || n > kExhaustiveCandidateLimit) continue;
        const RevisionContext serial{w.profile, w.sources, w.policy, w.lexicon, Execution::serial};
        const RevisionContext parallel{w.profile, w.sources, w.policy, w.lexicon, Execution::parallel};
        RetractionSet a, b;
        try {
            a = minimal_retraction(merged, r, conflicts, serial);
        } catch (const StateError&) {
            continue;
        }
        const double ts = best_of(repeats, [&] { a = minimal_retraction(merged, r, conflicts, serial); });
        const double tp = best_of(repeats, [&] { b = minimal_retraction(merged, r, conflicts, parallel); });
        if (!(a.elements == b.elements)) std::printf("  retractions differ\n");
        report(("retraction (" + std::to_string(n) + " candidates)").c_str(), ts, tp);
        return;
    }
    std::printf("retraction: no instance with 13-16 candidates found\n");
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
    std::printf("threads: %d, best of %d\n", omp_get_max_threads(), repeats);
    bench_evaluation(repeats);
    bench_footprints(repeats);
    bench_retraction(repeats);
}
