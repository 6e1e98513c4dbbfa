#include "mevir/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mevir/error.hpp"

namespace mevir {

std::vector<std::string> recommend_authorities(const std::string& topic, const SourceTable& sources, std::size_t k,
                                               double min_reputation) {
    if (k < 1) throw DataError("/k", "k must be at least 1");

    std::vector<const SourceRecord*> pool;
    for (const auto& [id, s] : sources) {
        if (s.expertise_domains.contains(topic) && s.reputation >= min_reputation) pool.push_back(&s);
    }
    // Canonical order: reputation desc, id asc.
    std::sort(pool.begin(), pool.end(), [](const SourceRecord* a, const SourceRecord* b) {
        if (a->reputation != b->reputation) return a->reputation > b->reputation;
        return a->id < b->id;
    });

    std::vector<const SourceRecord*> picked;
    std::vector<double> nearest(pool.size(), std::numeric_limits<double>::infinity());
    std::vector<char> taken(pool.size(), 0);
    while (picked.size() < k && picked.size() < pool.size()) {
        std::size_t best = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            // Pool order already encodes the tie-break, so only a strictly larger distance wins.
            if (best == pool.size() || nearest[i] > nearest[best]) best = i;
        }
        taken[best] = 1;
        picked.push_back(pool[best]);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            nearest[i] = std::min(nearest[i], std::abs(pool[i]->leaning - pool[best]->leaning));
        }
    }

    std::vector<std::string> out;
    out.reserve(picked.size());
    for (const auto* s : picked) out.push_back(s->id);
    return out;
}

}  // namespace mevir
