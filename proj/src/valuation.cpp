#include "specauction/valuation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "specauction/errors.hpp"

namespace specauction {

namespace {

constexpr int kEnumerationGuard = 20;

void check_probabilities(const std::vector<double>& q) {
    if (static_cast<int>(q.size()) > kEnumerationGuard)
        throw size_error("lottery guarded at k <= 20");
    for (double p : q)
        if (!(p >= 0.0 && p <= 1.0)) throw domain_error("lottery probability outside [0,1]");
}

// Poisson-binomial pmf of the number of successes among the given probabilities.
std::vector<double> success_pmf(const std::vector<double>& probs) {
    std::vector<double> pmf{1.0};
    pmf.reserve(probs.size() + 1);
    for (double p : probs) {
        pmf.push_back(0.0);
        for (size_t i = pmf.size(); i-- > 1;) pmf[i] = pmf[i] * (1.0 - p) + pmf[i - 1] * p;
        pmf[0] *= 1.0 - p;
    }
    return pmf;
}

double expect_over_counts(const std::vector<double>& pmf, const std::vector<double>& worth) {
    double sum = 0.0;
    for (size_t i = 0; i < pmf.size(); ++i) sum += pmf[i] * worth[std::min(i, worth.size() - 1)];
    return sum;
}

// worth lifted to counts: min(i, r).
std::vector<double> rank_worth(int r, int k) {
    std::vector<double> worth(k + 1);
    for (int i = 0; i <= k; ++i) worth[i] = std::min(i, r);
    return worth;
}

struct CountLottery {
    // E[b(X)], E[b(X_{-j} + 1) - b(X_{-j})], and the pairwise second
    // difference for X = sum of Bernoullis over `channels` with worth b.
    const std::vector<double>& worth;
    std::vector<int> channels;
    std::vector<double> probs;

    double value() const { return expect_over_counts(success_pmf(probs), worth); }

    double marginal(int slot) const {
        std::vector<double> rest = probs;
        rest.erase(rest.begin() + slot);
        std::vector<double> pmf = success_pmf(rest);
        double sum = 0.0;
        for (size_t i = 0; i < pmf.size(); ++i)
            sum += pmf[i] * (worth[std::min(i + 1, worth.size() - 1)] -
                             worth[std::min(i, worth.size() - 1)]);
        return sum;
    }

    double pair_curvature(int slot_a, int slot_b) const {
        std::vector<double> rest;
        for (size_t i = 0; i < probs.size(); ++i)
            if (static_cast<int>(i) != slot_a && static_cast<int>(i) != slot_b)
                rest.push_back(probs[i]);
        std::vector<double> pmf = success_pmf(rest);
        double sum = 0.0;
        for (size_t i = 0; i < pmf.size(); ++i) {
            double b0 = worth[std::min(i, worth.size() - 1)];
            double b1 = worth[std::min(i + 1, worth.size() - 1)];
            double b2 = worth[std::min(i + 2, worth.size() - 1)];
            sum += pmf[i] * (b2 - 2.0 * b1 + b0);
        }
        return sum;
    }
};

void validate_rank(const RankDescriptor& rank, int k) {
    if (const auto* u = std::get_if<UniformRank>(&rank)) {
        if (u->r < 0) throw domain_error("uniform rank must be >= 0");
        return;
    }
    if (const auto* p = std::get_if<PartitionRank>(&rank)) {
        if (p->blocks.size() != p->caps.size())
            throw domain_error("partition blocks and caps must align");
        std::vector<char> seen(k, 0);
        for (const auto& block : p->blocks) {
            for (int ch : block) {
                if (ch < 0 || ch >= k) throw domain_error("partition channel out of range");
                if (seen[ch]) throw domain_error("partition blocks must be disjoint");
                seen[ch] = 1;
            }
        }
        for (int cap : p->caps)
            if (cap < 0) throw domain_error("partition cap must be >= 0");
        return;
    }
    const auto& c = std::get<CoverageRank>(rank);
    if (static_cast<int>(c.covers.size()) != k)
        throw domain_error("coverage needs one cover set per channel");
    for (double w : c.element_weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw domain_error("coverage element weight < 0");
    for (const auto& cover : c.covers)
        for (int e : cover)
            if (e < 0 || e >= static_cast<int>(c.element_weights.size()))
                throw domain_error("coverage element out of range");
}

double rank_value(const RankDescriptor& rank, ChannelSet subset) {
    if (const auto* u = std::get_if<UniformRank>(&rank))
        return std::min(std::popcount(subset), u->r);
    if (const auto* p = std::get_if<PartitionRank>(&rank)) {
        double sum = 0.0;
        for (size_t b = 0; b < p->blocks.size(); ++b) {
            int hits = 0;
            for (int ch : p->blocks[b]) hits += (subset >> ch) & 1u;
            sum += std::min(hits, p->caps[b]);
        }
        return sum;
    }
    const auto& c = std::get<CoverageRank>(rank);
    double sum = 0.0;
    for (size_t e = 0; e < c.element_weights.size(); ++e) {
        for (size_t j = 0; j < c.covers.size(); ++j) {
            if (!((subset >> j) & 1u)) continue;
            if (std::find(c.covers[j].begin(), c.covers[j].end(), static_cast<int>(e)) !=
                c.covers[j].end()) {
                sum += c.element_weights[e];
                break;
            }
        }
    }
    return sum;
}

// channels of [0,k) that can affect the descriptor, with their probabilities
std::vector<int> all_channels(int k) {
    std::vector<int> v(k);
    for (int j = 0; j < k; ++j) v[j] = j;
    return v;
}

}  // namespace

void validate_valuation(const Valuation& val, int k) {
    if (k < 0) throw domain_error("negative channel count");
    if (const auto* s = std::get_if<SymmetricValuation>(&val)) {
        if (static_cast<int>(s->values.size()) != k + 1)
            throw domain_error("symmetric valuation needs k+1 values");
        if (s->values[0] != 0.0) throw domain_error("value of the empty bundle must be 0");
        for (int i = 0; i < k; ++i) {
            if (!std::isfinite(s->values[i + 1]) || s->values[i + 1] < s->values[i])
                throw domain_error("symmetric values must be finite and nondecreasing");
        }
        return;
    }
    const auto& m = std::get<MrsValuation>(val);
    for (const auto& term : m.terms) {
        if (!(term.weight >= 0.0) || !std::isfinite(term.weight))
            throw domain_error("term weight must be finite and >= 0");
        validate_rank(term.rank, k);
    }
}

bool is_symmetric(const Valuation& val) {
    return std::holds_alternative<SymmetricValuation>(val);
}

double value(const Valuation& val, int k, ChannelSet subset) {
    if (k < 32 && (subset >> k) != 0) throw domain_error("subset mentions channels >= k");
    if (const auto* s = std::get_if<SymmetricValuation>(&val)) {
        if (static_cast<int>(s->values.size()) != k + 1)
            throw domain_error("symmetric valuation does not match k");
        return s->values[std::popcount(subset)];
    }
    const auto& m = std::get<MrsValuation>(val);
    double sum = 0.0;
    for (const auto& term : m.terms) sum += term.weight * rank_value(term.rank, subset);
    return sum;
}

double value_count(const Valuation& val, int count) {
    const auto* s = std::get_if<SymmetricValuation>(&val);
    if (!s) throw mode_error("value_count requires a symmetric valuation");
    if (count < 0 || count >= static_cast<int>(s->values.size()))
        throw domain_error("bundle size out of range");
    return s->values[count];
}

namespace {

// Shared driver: walk the valuation's independent count-lotteries and the
// coverage terms, applying fn_count to each (worth, channels) pair and
// fn_cover to each weighted cover family.
template <class CountFn, class CoverFn>
void for_each_component(const Valuation& val, int k, CountFn&& fn_count, CoverFn&& fn_cover) {
    if (const auto* s = std::get_if<SymmetricValuation>(&val)) {
        if (static_cast<int>(s->values.size()) != k + 1)
            throw domain_error("symmetric valuation does not match k");
        fn_count(1.0, s->values, all_channels(k));
        return;
    }
    const auto& m = std::get<MrsValuation>(val);
    for (const auto& term : m.terms) {
        if (const auto* u = std::get_if<UniformRank>(&term.rank)) {
            fn_count(term.weight, rank_worth(u->r, k), all_channels(k));
        } else if (const auto* p = std::get_if<PartitionRank>(&term.rank)) {
            for (size_t b = 0; b < p->blocks.size(); ++b)
                fn_count(term.weight, rank_worth(p->caps[b], static_cast<int>(p->blocks[b].size())),
                         p->blocks[b]);
        } else {
            const auto& c = std::get<CoverageRank>(term.rank);
            fn_cover(term.weight, c);
        }
    }
}

}  // namespace

double lottery_value(const Valuation& val, const std::vector<double>& q) {
    check_probabilities(q);
    const int k = static_cast<int>(q.size());
    validate_valuation(val, k);
    double total = 0.0;
    for_each_component(
        val, k,
        [&](double w, const std::vector<double>& worth, const std::vector<int>& channels) {
            CountLottery lot{worth, channels, {}};
            for (int ch : channels) lot.probs.push_back(q[ch]);
            total += w * lot.value();
        },
        [&](double w, const CoverageRank& c) {
            for (size_t e = 0; e < c.element_weights.size(); ++e) {
                double miss = 1.0;
                for (int j = 0; j < k; ++j)
                    if (std::find(c.covers[j].begin(), c.covers[j].end(), static_cast<int>(e)) !=
                        c.covers[j].end())
                        miss *= 1.0 - q[j];
                total += w * c.element_weights[e] * (1.0 - miss);
            }
        });
    return total;
}

std::vector<double> lottery_gradient(const Valuation& val, const std::vector<double>& q) {
    check_probabilities(q);
    const int k = static_cast<int>(q.size());
    validate_valuation(val, k);
    std::vector<double> grad(k, 0.0);
    for_each_component(
        val, k,
        [&](double w, const std::vector<double>& worth, const std::vector<int>& channels) {
            CountLottery lot{worth, channels, {}};
            for (int ch : channels) lot.probs.push_back(q[ch]);
            for (size_t slot = 0; slot < channels.size(); ++slot)
                grad[channels[slot]] += w * lot.marginal(static_cast<int>(slot));
        },
        [&](double w, const CoverageRank& c) {
            for (size_t e = 0; e < c.element_weights.size(); ++e) {
                std::vector<int> owners;
                for (int j = 0; j < k; ++j)
                    if (std::find(c.covers[j].begin(), c.covers[j].end(), static_cast<int>(e)) !=
                        c.covers[j].end())
                        owners.push_back(j);
                for (int j : owners) {
                    double miss = 1.0;
                    for (int o : owners)
                        if (o != j) miss *= 1.0 - q[o];
                    grad[j] += w * c.element_weights[e] * miss;
                }
            }
        });
    return grad;
}

std::vector<double> lottery_hessian(const Valuation& val, const std::vector<double>& q) {
    check_probabilities(q);
    const int k = static_cast<int>(q.size());
    validate_valuation(val, k);
    std::vector<double> hess(static_cast<size_t>(k) * k, 0.0);
    auto at = [&](int a, int b) -> double& { return hess[static_cast<size_t>(a) * k + b]; };
    for_each_component(
        val, k,
        [&](double w, const std::vector<double>& worth, const std::vector<int>& channels) {
            CountLottery lot{worth, channels, {}};
            for (int ch : channels) lot.probs.push_back(q[ch]);
            for (size_t a = 0; a < channels.size(); ++a) {
                for (size_t b = a + 1; b < channels.size(); ++b) {
                    double h = w * lot.pair_curvature(static_cast<int>(a), static_cast<int>(b));
                    at(channels[a], channels[b]) += h;
                    at(channels[b], channels[a]) += h;
                }
            }
        },
        [&](double w, const CoverageRank& c) {
            for (size_t e = 0; e < c.element_weights.size(); ++e) {
                std::vector<int> owners;
                for (int j = 0; j < k; ++j)
                    if (std::find(c.covers[j].begin(), c.covers[j].end(), static_cast<int>(e)) !=
                        c.covers[j].end())
                        owners.push_back(j);
                for (size_t a = 0; a < owners.size(); ++a) {
                    for (size_t b = a + 1; b < owners.size(); ++b) {
                        double miss = 1.0;
                        for (int o : owners)
                            if (o != owners[a] && o != owners[b]) miss *= 1.0 - q[o];
                        double h = -w * c.element_weights[e] * miss;
                        at(owners[a], owners[b]) += h;
                        at(owners[b], owners[a]) += h;
                    }
                }
            }
        });
    return hess;
}

namespace {

nlohmann::json rank_to_json(const RankDescriptor& rank) {
    if (const auto* u = std::get_if<UniformRank>(&rank))
        return {{"kind", "uniform"}, {"r", u->r}};
    if (const auto* p = std::get_if<PartitionRank>(&rank))
        return {{"kind", "partition"}, {"blocks", p->blocks}, {"caps", p->caps}};
    const auto& c = std::get<CoverageRank>(rank);
    return {{"kind", "coverage"},
            {"element_weights", c.element_weights},
            {"covers", c.covers}};
}

RankDescriptor rank_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return UniformRank{j.at("r").get<int>()};
    if (kind == "partition")
        return PartitionRank{j.at("blocks").get<std::vector<std::vector<int>>>(),
                             j.at("caps").get<std::vector<int>>()};
    if (kind == "coverage")
        return CoverageRank{j.at("element_weights").get<std::vector<double>>(),
                            j.at("covers").get<std::vector<std::vector<int>>>()};
    throw domain_error("unknown rank descriptor kind: " + kind);
}

}  // namespace

void to_json(nlohmann::json& j, const Valuation& val) {
    if (const auto* s = std::get_if<SymmetricValuation>(&val)) {
        j = {{"type", "symmetric"}, {"values", s->values}};
        return;
    }
    const auto& m = std::get<MrsValuation>(val);
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : m.terms)
        terms.push_back({{"w", term.weight}, {"rank", rank_to_json(term.rank)}});
    j = {{"type", "mrs"}, {"terms", std::move(terms)}};
}

void from_json(const nlohmann::json& j, Valuation& val) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "symmetric") {
        val = SymmetricValuation{j.at("values").get<std::vector<double>>()};
        return;
    }
    if (type == "mrs") {
        MrsValuation m;
        for (const auto& t : j.at("terms"))
            m.terms.push_back({t.at("w").get<double>(), rank_from_json(t.at("rank"))});
        val = std::move(m);
        return;
    }
    throw domain_error("unknown valuation type: " + type);
}

}  // namespace specauction
