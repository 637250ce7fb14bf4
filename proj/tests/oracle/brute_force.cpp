#include "brute_force.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

std::vector<long double> prior(const std::vector<Hyp>& hyps, double lambda) {
    long double rules = 0;
    long double intervals = 0;
    for (const auto& h : hyps) {
        (h.is_rule ? rules : intervals) += 1;
    }
    long double rule_mass = lambda;
    long double interval_mass = 1.0L - lambda;
    if (rules == 0) {
        rule_mass = 0;
        interval_mass = lambda == 1.0 ? 0 : 1;
    }
    if (intervals == 0) {
        interval_mass = 0;
        rule_mass = lambda == 0.0 ? 0 : 1;
    }
    std::vector<long double> out;
    for (const auto& h : hyps) {
        out.push_back(h.is_rule ? rule_mass / rules : interval_mass / intervals);
    }
    return out;
}

long double likelihood(const Hyp& h, const std::vector<int>& xs, const Model& m) {
    long double p = 1;
    const long double size = h.members.size();
    for (int x : xs) {
        const bool in = h.members.count(x) > 0;
        if (m.binary) {
            p *= in ? 1.0L : 1.0L - m.alpha;
        } else {
            p *= in ? m.alpha / size + (1.0L - m.alpha) / m.n : (1.0L - m.alpha) / m.n;
        }
    }
    return p;
}

std::optional<std::vector<double>> posterior(const std::vector<Hyp>& hyps,
                                             const std::vector<int>& xs, const Model& m) {
    const auto pr = prior(hyps, m.lambda);
    std::vector<long double> joint;
    long double total = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        joint.push_back(pr[i] * likelihood(hyps[i], xs, m));
        total += joint.back();
    }
    if (total == 0) {
        return std::nullopt;
    }
    std::vector<double> out;
    for (auto j : joint) {
        out.push_back(static_cast<double>(j / total));
    }
    return out;
}

std::optional<std::vector<double>> predict_avg(const std::vector<Hyp>& hyps,
                                               const std::vector<int>& xs, const Model& m) {
    const auto post = posterior(hyps, xs, m);
    if (!post) {
        return std::nullopt;
    }
    std::vector<double> out;
    for (int y = 1; y <= m.n; ++y) {
        long double p = 0;
        for (std::size_t i = 0; i < hyps.size(); ++i) {
            p += static_cast<long double>((*post)[i]) *
                 (hyps[i].members.count(y) ? 1.0L : 1.0L - m.alpha);
        }
        out.push_back(static_cast<double>(p));
    }
    return out;
}

std::optional<std::size_t> select(const std::vector<Hyp>& hyps, const std::vector<int>& xs,
                                  const Model& m, bool use_prior) {
    const auto pr = prior(hyps, m.lambda);
    std::optional<std::size_t> best;
    long double best_score = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        if (use_prior && pr[i] == 0) {
            continue;
        }
        const long double score =
            use_prior ? std::log(pr[i]) + std::log(likelihood(hyps[i], xs, m))
                      : std::log(likelihood(hyps[i], xs, m));
        if (std::isinf(score) && score < 0) {
            continue;
        }
        bool take = !best || score > best_score + 1e-12L;
        if (best && std::fabs(score - best_score) <= 1e-12L) {
            const auto& a = hyps[i];
            const auto& b = hyps[*best];
            take = a.members.size() < b.members.size() ||
                   (a.members.size() == b.members.size() && a.is_rule && !b.is_rule);
        }
        if (take) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

std::vector<double> predict_single(const Hyp& h, const Model& m) {
    std::vector<double> out;
    for (int y = 1; y <= m.n; ++y) {
        out.push_back(h.members.count(y) ? 1.0 : 1.0 - m.alpha);
    }
    return out;
}

double jsd(std::vector<double> p, std::vector<double> q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("length mismatch");
    }
    for (auto* v : {&p, &q}) {
        double s = 0;
        for (double x : *v) {
            s += x;
        }
        for (double& x : *v) {
            x = s == 0 ? 1.0 / static_cast<double>(v->size()) : x / s;
        }
    }
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double mid = (p[i] + q[i]) / 2;
        if (p[i] > 0) {
            d += 0.5 * p[i] * std::log2(p[i] / mid);
        }
        if (q[i] > 0) {
            d += 0.5 * q[i] * std::log2(q[i] / mid);
        }
    }
    return d;
}

double bernoulli_jsd(double p, double q) {
    return jsd({p, 1 - p}, {q, 1 - q});
}

std::set<int> rule_members(const std::string& name, int n) {
    std::set<int> out;
    const auto suffix_int = [&name](const std::string& prefix) {
        return std::stoi(name.substr(prefix.size()));
    };
    for (int y = 1; y <= n; ++y) {
        bool in = false;
        if (name == "all_numbers") {
            in = true;
        } else if (name == "even") {
            in = y % 2 == 0;
        } else if (name == "odd") {
            in = y % 2 == 1;
        } else if (name == "square") {
            for (int k = 1; k * k <= y; ++k) {
                in = in || k * k == y;
            }
        } else if (name == "cube") {
            for (int k = 1; k * k * k <= y; ++k) {
                in = in || k * k * k == y;
            }
        } else if (name == "prime") {
            in = y > 1;
            for (int d = 2; d < y; ++d) {
                in = in && y % d != 0;
            }
        } else if (name.rfind("multiples_of_", 0) == 0) {
            in = y % suffix_int("multiples_of_") == 0;
        } else if (name.rfind("powers_of_", 0) == 0) {
            const int b = suffix_int("powers_of_");
            for (long long p = b; p <= y; p *= b) {
                in = in || p == y;
            }
        } else if (name.rfind("ends_in_", 0) == 0) {
            in = y % 10 == suffix_int("ends_in_");
        } else {
            throw std::invalid_argument("unknown rule " + name);
        }
        if (in) {
            out.insert(y);
        }
    }
    return out;
}

} // namespace oracle
