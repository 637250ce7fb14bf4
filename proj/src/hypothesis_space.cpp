#include "numgame/hypothesis_space.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "numgame/error.hpp"

namespace numgame {

namespace {

void require_domain(int domain_max) {
    if (domain_max < 1) {
        throw Error(ErrorCode::InvalidDomain,
                    "domain_max must be >= 1, got " + std::to_string(domain_max));
    }
}

bool is_prime(int n) {
    if (n < 2) {
        return false;
    }
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

bool is_perfect_power(int n, int exponent) {
    for (int r = 1;; ++r) {
        long long p = 1;
        for (int i = 0; i < exponent; ++i) {
            p *= r;
        }
        if (p == n) {
            return true;
        }
        if (p > n) {
            return false;
        }
    }
}

bool predicate_holds(const std::string& name, int n) {
    if (name == "all_numbers") return true;
    if (name == "even") return n % 2 == 0;
    if (name == "odd") return n % 2 != 0;
    if (name == "square") return is_perfect_power(n, 2);
    if (name == "cube") return is_perfect_power(n, 3);
    if (name == "prime") return is_prime(n);
    throw Error(ErrorCode::Validation, "unknown rule predicate '" + name + "'");
}

const std::map<std::string, RuleKind>& kind_names() {
    static const std::map<std::string, RuleKind> names{
        {"predicate_name", RuleKind::Predicate},
        {"multiples", RuleKind::Multiples},
        {"powers", RuleKind::Powers},
        {"ends_in", RuleKind::EndsIn},
    };
    return names;
}

std::string kind_name(RuleKind kind) {
    for (const auto& [name, k] : kind_names()) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

RuleSpec predicate_rule(const std::string& name, const std::string& label) {
    return RuleSpec{name, label, RuleKind::Predicate, name, 0, false};
}

} // namespace

std::string_view to_string(HypothesisKind kind) noexcept {
    return kind == HypothesisKind::Rule ? "rule" : "interval";
}

bool Hypothesis::contains(int y) const noexcept {
    return std::binary_search(extension.begin(), extension.end(), y);
}

bool Hypothesis::contains_all(std::span<const int> xs) const noexcept {
    return std::all_of(xs.begin(), xs.end(), [this](int x) { return contains(x); });
}

std::vector<int> rule_extension(const RuleSpec& rule, int domain_max) {
    require_domain(domain_max);
    std::vector<int> out;
    switch (rule.kind) {
    case RuleKind::Predicate:
        for (int n = 1; n <= domain_max; ++n) {
            if (predicate_holds(rule.predicate, n)) {
                out.push_back(n);
            }
        }
        break;
    case RuleKind::Multiples:
        if (rule.parameter < 1) {
            throw Error(ErrorCode::Validation, "rule '" + rule.id + "': factor must be >= 1");
        }
        for (int n = rule.parameter; n <= domain_max; n += rule.parameter) {
            out.push_back(n);
        }
        break;
    case RuleKind::Powers: {
        if (rule.parameter < 2) {
            throw Error(ErrorCode::Validation, "rule '" + rule.id + "': base must be >= 2");
        }
        long long p = rule.include_zero_exponent ? 1 : rule.parameter;
        for (; p <= domain_max; p *= rule.parameter) {
            out.push_back(static_cast<int>(p));
        }
        break;
    }
    case RuleKind::EndsIn:
        if (rule.parameter < 0 || rule.parameter > 9) {
            throw Error(ErrorCode::Validation, "rule '" + rule.id + "': digit must be in 0..9");
        }
        for (int n = 1; n <= domain_max; ++n) {
            if (n % 10 == rule.parameter) {
                out.push_back(n);
            }
        }
        break;
    }
    return out;
}

RuleRegistry default_rule_registry() {
    RuleRegistry r;
    r.push_back(predicate_rule("all_numbers", "all numbers"));
    r.push_back(predicate_rule("even", "even numbers"));
    r.push_back(predicate_rule("odd", "odd numbers"));
    r.push_back(predicate_rule("square", "square numbers"));
    r.push_back(predicate_rule("cube", "cube numbers"));
    r.push_back(predicate_rule("prime", "prime numbers"));
    for (int k = 3; k <= 12; ++k) {
        r.push_back({"multiples_of_" + std::to_string(k), "multiples of " + std::to_string(k),
                     RuleKind::Multiples, "", k, false});
    }
    for (int k = 2; k <= 10; ++k) {
        r.push_back({"powers_of_" + std::to_string(k), "powers of " + std::to_string(k),
                     RuleKind::Powers, "", k, false});
    }
    for (int d = 0; d <= 9; ++d) {
        r.push_back({"ends_in_" + std::to_string(d), "numbers ending in " + std::to_string(d),
                     RuleKind::EndsIn, "", d, false});
    }
    return r;
}

RuleRegistry rule_registry_from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) {
        throw Error(ErrorCode::Parse, "rule registry must be a JSON array");
    }
    RuleRegistry registry;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        const std::string where = "registry[" + std::to_string(i) + "]";
        if (!item.is_object() || !item.contains("id") || !item.contains("kind")) {
            throw Error(ErrorCode::Parse, where + ": expected object with 'id' and 'kind'");
        }
        RuleSpec rule;
        try {
            rule.id = item.at("id").get<std::string>();
            rule.label = item.value("label", rule.id);
            const auto kind = item.at("kind").get<std::string>();
            const auto it = kind_names().find(kind);
            if (it == kind_names().end()) {
                throw Error(ErrorCode::Parse, where + ": unknown kind '" + kind + "'");
            }
            rule.kind = it->second;
            switch (rule.kind) {
            case RuleKind::Predicate:
                rule.predicate = item.value("name", rule.id);
                predicate_holds(rule.predicate, 1);
                break;
            case RuleKind::Multiples:
                rule.parameter = item.at("k").get<int>();
                break;
            case RuleKind::Powers:
                rule.parameter = item.at("base").get<int>();
                rule.include_zero_exponent = item.value("include_zero_exponent", false);
                break;
            case RuleKind::EndsIn:
                rule.parameter = item.at("digit").get<int>();
                break;
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, where + ": " + e.what());
        }
        registry.push_back(std::move(rule));
    }
    return registry;
}

nlohmann::json rule_registry_to_json(const RuleRegistry& registry) {
    auto out = nlohmann::json::array();
    for (const auto& rule : registry) {
        nlohmann::json item{{"id", rule.id}, {"label", rule.label}, {"kind", kind_name(rule.kind)}};
        switch (rule.kind) {
        case RuleKind::Predicate: item["name"] = rule.predicate; break;
        case RuleKind::Multiples: item["k"] = rule.parameter; break;
        case RuleKind::Powers:
            item["base"] = rule.parameter;
            item["include_zero_exponent"] = rule.include_zero_exponent;
            break;
        case RuleKind::EndsIn: item["digit"] = rule.parameter; break;
        }
        out.push_back(std::move(item));
    }
    return out;
}

RuleRegistry load_rule_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open rule registry " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
    }
    return rule_registry_from_json(doc);
}

std::vector<Hypothesis> build_interval_concepts(int domain_max) {
    require_domain(domain_max);
    std::vector<Hypothesis> out;
    out.reserve(static_cast<std::size_t>(domain_max) * (domain_max + 1) / 2);
    for (int a = 1; a <= domain_max; ++a) {
        for (int b = a; b <= domain_max; ++b) {
            Hypothesis h;
            h.id = "interval:" + std::to_string(a) + "-" + std::to_string(b);
            h.label = a == b ? "{" + std::to_string(a) + "}"
                             : std::to_string(a) + "-" + std::to_string(b);
            h.kind = HypothesisKind::Interval;
            h.extension.resize(static_cast<std::size_t>(b - a + 1));
            for (int i = 0; i <= b - a; ++i) {
                h.extension[static_cast<std::size_t>(i)] = a + i;
            }
            out.push_back(std::move(h));
        }
    }
    return out;
}

std::vector<Hypothesis> build_rule_concepts(int domain_max, const RuleRegistry& registry) {
    require_domain(domain_max);
    if (registry.empty()) {
        throw Error(ErrorCode::Validation, "rule registry is empty");
    }
    std::vector<Hypothesis> out;
    std::set<std::vector<int>> seen;
    for (const auto& rule : registry) {
        auto extension = rule_extension(rule, domain_max);
        if (extension.empty() || !seen.insert(extension).second) {
            continue;
        }
        out.push_back({rule.id, rule.label, HypothesisKind::Rule, std::move(extension)});
    }
    return out;
}

HypothesisSpace HypothesisSpace::build(int domain_max, const RuleRegistry& registry) {
    auto hypotheses = build_rule_concepts(domain_max, registry);
    auto intervals = build_interval_concepts(domain_max);
    hypotheses.insert(hypotheses.end(), std::make_move_iterator(intervals.begin()),
                      std::make_move_iterator(intervals.end()));
    return from_hypotheses(domain_max, std::move(hypotheses));
}

HypothesisSpace HypothesisSpace::from_hypotheses(int domain_max, std::vector<Hypothesis> hypotheses) {
    require_domain(domain_max);
    HypothesisSpace space;
    space.domain_max_ = domain_max;
    for (const auto& h : hypotheses) {
        const auto& ext = h.extension;
        if (ext.empty()) {
            throw Error(ErrorCode::Validation, "hypothesis '" + h.id + "' has an empty extension");
        }
        if (!std::is_sorted(ext.begin(), ext.end()) ||
            std::adjacent_find(ext.begin(), ext.end()) != ext.end()) {
            throw Error(ErrorCode::Validation,
                        "hypothesis '" + h.id + "' extension must be sorted and duplicate-free");
        }
        if (ext.front() < 1 || ext.back() > domain_max) {
            throw Error(ErrorCode::Validation,
                        "hypothesis '" + h.id + "' has members outside 1.." + std::to_string(domain_max));
        }
        if (h.kind == HypothesisKind::Interval &&
            ext.back() - ext.front() + 1 != static_cast<int>(ext.size())) {
            throw Error(ErrorCode::Validation, "interval '" + h.id + "' is not contiguous");
        }
        (h.kind == HypothesisKind::Rule ? space.rule_count_ : space.interval_count_)++;
    }
    if (hypotheses.empty()) {
        throw Error(ErrorCode::Validation, "hypothesis space is empty");
    }
    space.hypotheses_ = std::move(hypotheses);
    space.index();
    return space;
}

void HypothesisSpace::index() {
    membership_.assign(static_cast<std::size_t>(domain_max_) + 1, {});
    for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
        for (int y : hypotheses_[i].extension) {
            membership_[static_cast<std::size_t>(y)].push_back(i);
        }
    }
}

std::span<const std::size_t> HypothesisSpace::hypotheses_containing(int y) const {
    if (y < 1 || y > domain_max_) {
        throw Error(ErrorCode::InvalidTarget, "target " + std::to_string(y) + " outside 1.." +
                                                  std::to_string(domain_max_));
    }
    return membership_[static_cast<std::size_t>(y)];
}

std::size_t HypothesisSpace::find(std::string_view id) const noexcept {
    for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
        if (hypotheses_[i].id == id) {
            return i;
        }
    }
    return hypotheses_.size();
}

nlohmann::json HypothesisSpace::to_json() const {
    auto list = nlohmann::json::array();
    for (const auto& h : hypotheses_) {
        list.push_back({{"id", h.id},
                        {"label", h.label},
                        {"kind", to_string(h.kind)},
                        {"size", h.size()},
                        {"extension", h.extension}});
    }
    return {{"domain_max", domain_max_},
            {"rule_count", rule_count_},
            {"interval_count", interval_count_},
            {"hypotheses", std::move(list)}};
}

} // namespace numgame
