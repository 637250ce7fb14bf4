#include "numgame/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "numgame/error.hpp"
#include "numgame/text.hpp"

namespace numgame {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json parse_json_text(const std::string& text, const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw Error(ErrorCode::Parse,
                    path.string() + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    return out;
}

constexpr long long kValueCap = 1'000'000'000'000LL;

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

std::string op_name(TransformStep::Op op) {
    switch (op) {
    case TransformStep::Op::Identity: return "identity";
    case TransformStep::Op::Multiply: return "mul";
    case TransformStep::Op::Add: return "add";
    case TransformStep::Op::Square: return "square";
    case TransformStep::Op::Exp2: return "exp2";
    }
    return "identity";
}

TransformStep::Op parse_op(const std::string& name) {
    if (name == "identity") return TransformStep::Op::Identity;
    if (name == "mul") return TransformStep::Op::Multiply;
    if (name == "add") return TransformStep::Op::Add;
    if (name == "square") return TransformStep::Op::Square;
    if (name == "exp2") return TransformStep::Op::Exp2;
    throw Error(ErrorCode::Parse, "unknown transform op '" + name + "'");
}

Transform make_transform(std::string id, std::vector<TransformStep> steps) {
    return Transform{std::move(id), std::move(steps)};
}

using Op = TransformStep::Op;

/// Upper bound on the number of distinct subsets of size 1..max_len.
std::size_t subset_capacity(std::span<const ConceptSpec> concepts, std::size_t max_len,
                            std::size_t cap) {
    std::size_t total = 0;
    for (const auto& c : concepts) {
        const auto n = c.full_extension.size();
        double binom = 1.0;
        for (std::size_t k = 1; k <= std::min(max_len, n); ++k) {
            binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
            total += static_cast<std::size_t>(std::min(binom, static_cast<double>(cap)));
            if (total >= cap) {
                return cap;
            }
        }
    }
    return total;
}

} // namespace

// ---------------------------------------------------------------------------
// Example sets

ExampleSetFile example_sets_from_json(const nlohmann::json& doc, int domain_max) {
    ExampleSetFile out;
    const nlohmann::json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("example_sets")) {
            throw Error(ErrorCode::Parse, "expected an array of example sets or an object with "
                                          "'example_sets'");
        }
        list = &doc.at("example_sets");
    }
    if (!list->is_array()) {
        throw Error(ErrorCode::Parse, "example sets must be a JSON array");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < list->size(); ++i) {
        const auto& item = (*list)[i];
        const std::string where = "sets[" + std::to_string(i) + "]";
        if (!item.is_object()) {
            throw Error(ErrorCode::Parse, where + ": expected an object");
        }
        if (!item.contains("examples") || !item.at("examples").is_array()) {
            throw Error(ErrorCode::Parse, where + ".examples: missing or not an array");
        }
        ExampleSet set;
        const auto& examples = item.at("examples");
        for (std::size_t k = 0; k < examples.size(); ++k) {
            if (!examples[k].is_number_integer()) {
                throw Error(ErrorCode::Parse, where + ".examples[" + std::to_string(k) +
                                                  "]: expected an integer");
            }
            set.examples.push_back(examples[k].get<int>());
        }
        if (item.contains("id")) {
            if (!item.at("id").is_string()) {
                throw Error(ErrorCode::Parse, where + ".id: expected a string");
            }
            set.id = item.at("id").get<std::string>();
        } else {
            set.id = canonical_set_id(set.examples);
        }
        if (item.contains("concept") && !item.at("concept").is_null()) {
            if (!item.at("concept").is_string()) {
                throw Error(ErrorCode::Parse, where + ".concept: expected a string");
            }
            set.source_concept = item.at("concept").get<std::string>();
        }
        validate_example_set(set, domain_max);
        if (!seen.insert(set.id).second) {
            out.warnings.push_back("duplicate example set id '" + set.id + "' ignored");
            continue;
        }
        out.sets.push_back(std::move(set));
    }
    return out;
}

ExampleSetFile load_example_sets(const std::filesystem::path& path, int domain_max) {
    const auto text = read_file(path);
    if (trim(text).empty()) {
        return {{}, {path.string() + ": empty file, no example sets loaded"}};
    }
    try {
        return example_sets_from_json(parse_json_text(text, path), domain_max);
    } catch (const Error& e) {
        const std::string message = e.what();
        if (message.rfind(path.string(), 0) == 0) {
            throw;
        }
        throw Error(e.code(), path.string() + ": " + message);
    }
}

nlohmann::json example_sets_to_json(std::span<const ExampleSet> sets) {
    auto out = nlohmann::json::array();
    for (const auto& s : sets) {
        nlohmann::json item{{"id", s.id}, {"examples", s.examples}};
        if (s.source_concept) {
            item["concept"] = *s.source_concept;
        }
        out.push_back(std::move(item));
    }
    return out;
}

void save_example_sets(const std::filesystem::path& path, std::span<const ExampleSet> sets) {
    write_json_file(path, example_sets_to_json(sets));
}

// ---------------------------------------------------------------------------
// Response matrices

MissingCellPolicy parse_missing_cell_policy(std::string_view text) {
    if (text == "set-mean") return MissingCellPolicy::SetMean;
    if (text == "zero") return MissingCellPolicy::Zero;
    if (text == "drop-set") return MissingCellPolicy::DropSet;
    throw Error(ErrorCode::Usage, "unknown missing-cell policy '" + std::string(text) +
                                      "' (expected set-mean, zero or drop-set)");
}

std::size_t fill_missing_cells(ResponseMatrix& matrix, MissingCellPolicy policy,
                               std::vector<std::string>* warnings) {
    std::size_t filled = 0;
    for (auto it = matrix.rows.begin(); it != matrix.rows.end();) {
        auto& row = it->second;
        double sum = 0.0;
        std::size_t observed = 0;
        for (double v : row) {
            if (!std::isnan(v)) {
                sum += v;
                ++observed;
            }
        }
        const auto missing = row.size() - observed;
        if (missing == 0) {
            ++it;
            continue;
        }
        if (policy == MissingCellPolicy::DropSet || observed == 0) {
            if (warnings != nullptr) {
                warnings->push_back("set '" + it->first + "': " + std::to_string(missing) +
                                    " missing cells, set dropped");
            }
            matrix.trial_counts.erase(it->first);
            it = matrix.rows.erase(it);
            continue;
        }
        const double fill = policy == MissingCellPolicy::Zero
                                ? 0.0
                                : sum / static_cast<double>(observed);
        for (auto& v : row) {
            if (std::isnan(v)) {
                v = fill;
            }
        }
        filled += missing;
        if (warnings != nullptr) {
            warnings->push_back("set '" + it->first + "': filled " + std::to_string(missing) +
                                " missing cells with " + format_double(fill));
        }
        ++it;
    }
    matrix.filled_cells += filled;
    return filled;
}

ResponseMatrix read_response_matrix(std::istream& in, const std::string& agent,
                                    const MatrixLoadOptions& options,
                                    std::vector<std::string>* warnings) {
    if (options.domain_max < 1) {
        throw Error(ErrorCode::InvalidDomain, "domain_max must be >= 1");
    }
    ResponseMatrix m;
    m.agent = agent;
    m.domain_max = options.domain_max;
    const auto n = static_cast<std::size_t>(options.domain_max);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::string line;
    std::size_t line_no = 0;
    bool has_trials = false;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        const auto fields = split(content, ',');
        const std::string where = agent + ":" + std::to_string(line_no);
        if (!header_seen) {
            header_seen = true;
            std::vector<std::string> names;
            for (const auto& f : fields) {
                names.emplace_back(trim(f));
            }
            const std::vector<std::string> base{"set_id", "target", "p_yes"};
            has_trials = names.size() == 4 && names[3] == "n_trials";
            if (!(names.size() == 3 || has_trials) ||
                !std::equal(base.begin(), base.end(), names.begin())) {
                throw Error(ErrorCode::Parse,
                            where + ": expected header 'set_id,target,p_yes[,n_trials]'");
            }
            continue;
        }
        if (fields.size() != (has_trials ? 4u : 3u)) {
            throw Error(ErrorCode::Parse, where + ": expected " + (has_trials ? "4" : "3") +
                                              " fields, got " + std::to_string(fields.size()));
        }
        const std::string set_id(trim(fields[0]));
        if (set_id.empty()) {
            throw Error(ErrorCode::Parse, where + ": empty set_id");
        }
        const int target = parse_int(fields[1], where + " target");
        const double p = parse_double(fields[2], where + " p_yes");
        if (target < 1 || target > options.domain_max) {
            throw Error(ErrorCode::Validation, where + ": target " + std::to_string(target) +
                                                   " outside 1.." +
                                                   std::to_string(options.domain_max));
        }
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::Validation,
                        where + ": p_yes " + format_double(p) + " outside [0, 1]");
        }
        auto& row = m.rows.try_emplace(set_id, n, nan).first->second;
        const auto idx = static_cast<std::size_t>(target - 1);
        if (!std::isnan(row[idx])) {
            throw Error(ErrorCode::Conflict, where + ": duplicate cell (" + set_id + ", " +
                                                 std::to_string(target) + ")");
        }
        row[idx] = p;
        if (has_trials) {
            const int trials = parse_int(fields[3], where + " n_trials");
            if (trials < 0) {
                throw Error(ErrorCode::Validation, where + ": n_trials must be >= 0");
            }
            m.trial_counts.try_emplace(set_id, n, 0).first->second[idx] = trials;
        }
    }
    if (!header_seen) {
        throw Error(ErrorCode::Parse, agent + ": missing header 'set_id,target,p_yes'");
    }
    fill_missing_cells(m, options.missing, warnings);
    return m;
}

ResponseMatrix load_response_matrix(const std::filesystem::path& path, const std::string& agent,
                                    const MatrixLoadOptions& options,
                                    std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open response matrix " + path.string());
    }
    return read_response_matrix(in, agent, options, warnings);
}

void write_response_matrix(std::ostream& out, const ResponseMatrix& matrix) {
    const bool trials = !matrix.trial_counts.empty();
    out << (trials ? "set_id,target,p_yes,n_trials\n" : "set_id,target,p_yes\n");
    for (const auto& [set_id, row] : matrix.rows) {
        const auto tc = matrix.trial_counts.find(set_id);
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << set_id << ',' << (i + 1) << ',' << format_double(row[i]);
            if (trials) {
                out << ',' << (tc == matrix.trial_counts.end() ? 0 : tc->second[i]);
            }
            out << '\n';
        }
    }
}

void save_response_matrix(const std::filesystem::path& path, const ResponseMatrix& matrix) {
    auto out = open_output(path);
    write_response_matrix(out, matrix);
}

// ---------------------------------------------------------------------------
// Concepts and transforms

std::string_view to_string(BaseCategory base) noexcept {
    switch (base) {
    case BaseCategory::All: return "all";
    case BaseCategory::Even: return "even";
    case BaseCategory::Odd: return "odd";
    case BaseCategory::Square: return "square";
    case BaseCategory::Cube: return "cube";
    case BaseCategory::Prime: return "prime";
    }
    return "all";
}

BaseCategory parse_base_category(std::string_view text) {
    for (auto b : {BaseCategory::All, BaseCategory::Even, BaseCategory::Odd, BaseCategory::Square,
                   BaseCategory::Cube, BaseCategory::Prime}) {
        if (to_string(b) == text) {
            return b;
        }
    }
    throw Error(ErrorCode::Parse, "unknown base category '" + std::string(text) + "'");
}

std::vector<int> base_members(BaseCategory base, int domain_max) {
    std::vector<int> out;
    for (int n = 1; n <= domain_max; ++n) {
        const int r2 = static_cast<int>(std::lround(std::sqrt(n)));
        const int r3 = static_cast<int>(std::lround(std::cbrt(n)));
        bool keep = false;
        switch (base) {
        case BaseCategory::All: keep = true; break;
        case BaseCategory::Even: keep = n % 2 == 0; break;
        case BaseCategory::Odd: keep = n % 2 != 0; break;
        case BaseCategory::Square: keep = r2 * r2 == n; break;
        case BaseCategory::Cube: keep = r3 * r3 * r3 == n; break;
        case BaseCategory::Prime: keep = is_prime(n); break;
        }
        if (keep) {
            out.push_back(n);
        }
    }
    return out;
}

std::optional<long long> Transform::apply(long long n) const {
    long long v = n;
    for (const auto& s : steps) {
        switch (s.op) {
        case Op::Identity: break;
        case Op::Multiply: v *= s.k; break;
        case Op::Add: v += s.k; break;
        case Op::Square: v *= v; break;
        case Op::Exp2:
            if (v < 0 || v >= 40) {
                return std::nullopt;
            }
            v = 1LL << v;
            break;
        }
        if (v > kValueCap || v < -kValueCap) {
            return std::nullopt;
        }
    }
    return v;
}

std::string Transform::description() const {
    std::string expr = "n";
    bool is_sum = false;
    for (const auto& s : steps) {
        const bool atomic = expr == "n";
        switch (s.op) {
        case Op::Identity: continue;
        case Op::Multiply:
            expr = std::to_string(s.k) + (atomic ? expr : is_sum ? "(" + expr + ")" : "*" + expr);
            is_sum = false;
            break;
        case Op::Add:
            expr += s.k < 0 ? " - " + std::to_string(-s.k) : " + " + std::to_string(s.k);
            is_sum = true;
            break;
        case Op::Square:
            expr = (atomic ? expr : "(" + expr + ")") + "^2";
            is_sum = false;
            break;
        case Op::Exp2:
            expr = "2^" + (atomic ? expr : "(" + expr + ")");
            is_sum = false;
            break;
        }
    }
    return "f(n) = " + expr;
}

std::vector<Transform> default_transforms() {
    return {
        make_transform("identity", {{Op::Identity, 0}}),
        make_transform("2n", {{Op::Multiply, 2}}),
        make_transform("3n", {{Op::Multiply, 3}}),
        make_transform("5n", {{Op::Multiply, 5}}),
        make_transform("10n", {{Op::Multiply, 10}}),
        make_transform("n+1", {{Op::Add, 1}}),
        make_transform("n+2", {{Op::Add, 2}}),
        make_transform("n+5", {{Op::Add, 5}}),
        make_transform("n+10", {{Op::Add, 10}}),
        make_transform("n-1", {{Op::Add, -1}}),
        make_transform("n^2", {{Op::Square, 0}}),
        make_transform("2^n", {{Op::Exp2, 0}}),
        make_transform("2^n+1", {{Op::Exp2, 0}, {Op::Add, 1}}),
        make_transform("2^n-1", {{Op::Exp2, 0}, {Op::Add, -1}}),
        make_transform("2n+1", {{Op::Multiply, 2}, {Op::Add, 1}}),
        make_transform("3n+1", {{Op::Multiply, 3}, {Op::Add, 1}}),
        make_transform("10n+5", {{Op::Multiply, 10}, {Op::Add, 5}}),
        make_transform("n^2+1", {{Op::Square, 0}, {Op::Add, 1}}),
        make_transform("n^2-1", {{Op::Square, 0}, {Op::Add, -1}}),
        make_transform("2n^2", {{Op::Square, 0}, {Op::Multiply, 2}}),
        make_transform("(n+1)^2", {{Op::Add, 1}, {Op::Square, 0}}),
        make_transform("3*2^n", {{Op::Exp2, 0}, {Op::Multiply, 3}}),
    };
}

std::vector<Transform> transforms_from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) {
        throw Error(ErrorCode::Parse, "transform registry must be a JSON array");
    }
    std::vector<Transform> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        const std::string where = "transforms[" + std::to_string(i) + "]";
        try {
            Transform t;
            t.id = item.at("id").get<std::string>();
            for (const auto& step : item.at("steps")) {
                t.steps.push_back({parse_op(step.at("op").get<std::string>()),
                                   step.value("k", 0LL)});
            }
            out.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, where + ": " + e.what());
        }
    }
    return out;
}

nlohmann::json transforms_to_json(std::span<const Transform> transforms) {
    auto out = nlohmann::json::array();
    for (const auto& t : transforms) {
        auto steps = nlohmann::json::array();
        for (const auto& s : t.steps) {
            nlohmann::json step{{"op", op_name(s.op)}};
            if (s.op == Op::Multiply || s.op == Op::Add) {
                step["k"] = s.k;
            }
            steps.push_back(std::move(step));
        }
        out.push_back({{"id", t.id}, {"description", t.description()}, {"steps", std::move(steps)}});
    }
    return out;
}

std::string ConceptSpec::label() const {
    return transform.description() + " over " + std::string(to_string(base)) + " numbers";
}

ConceptSpec make_concept(BaseCategory base, const Transform& transform, int domain_max) {
    ConceptSpec c;
    c.id = std::string(to_string(base)) + "|" + transform.id;
    c.base = base;
    c.transform = transform;
    std::set<int> members;
    for (int n : base_members(base, domain_max)) {
        const auto v = transform.apply(n);
        if (v && *v >= 1 && *v <= domain_max) {
            members.insert(static_cast<int>(*v));
        }
    }
    c.full_extension.assign(members.begin(), members.end());
    return c;
}

std::vector<ConceptSpec> candidate_concepts(const GenerationOptions& options) {
    std::vector<ConceptSpec> out;
    std::set<std::vector<int>> seen;
    for (auto base : options.bases) {
        for (const auto& t : options.transforms) {
            auto c = make_concept(base, t, options.domain_max);
            if (c.full_extension.empty() || !seen.insert(c.full_extension).second) {
                continue;
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

DatasetManifest generate_dataset(const GenerationOptions& options) {
    if (options.bases.empty() || options.transforms.empty()) {
        throw Error(ErrorCode::Usage, "generation needs at least one base category and transform");
    }
    if (options.max_set_length < 1) {
        throw Error(ErrorCode::Usage, "max set length must be >= 1");
    }
    auto candidates = candidate_concepts(options);
    if (options.concept_count > candidates.size()) {
        throw Error(ErrorCode::Capacity, "requested " + std::to_string(options.concept_count) +
                                             " concepts but only " +
                                             std::to_string(candidates.size()) +
                                             " distinct non-empty concepts exist");
    }

    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(options.concept_count);
    std::sort(order.begin(), order.end());

    DatasetManifest manifest;
    manifest.seed = options.seed;
    manifest.domain_max = options.domain_max;
    for (auto i : order) {
        manifest.concepts.push_back(std::move(candidates[i]));
    }
    if (options.set_count == 0) {
        return manifest;
    }
    if (manifest.concepts.empty()) {
        throw Error(ErrorCode::Capacity, "no concepts to sample example sets from");
    }
    const auto capacity =
        subset_capacity(manifest.concepts, options.max_set_length, options.set_count);
    if (capacity < options.set_count) {
        throw Error(ErrorCode::Capacity, "requested " + std::to_string(options.set_count) +
                                             " example sets but the concepts admit at most " +
                                             std::to_string(capacity));
    }

    std::set<std::string> used;
    const std::size_t max_attempts = 1000 * options.set_count;
    for (std::size_t attempt = 0;
         manifest.example_sets.size() < options.set_count && attempt < max_attempts; ++attempt) {
        const auto& concept_spec = manifest.concepts[attempt % manifest.concepts.size()];
        auto pool = concept_spec.full_extension;
        const auto longest = std::min(options.max_set_length, pool.size());
        std::uniform_int_distribution<std::size_t> pick_length(1, longest);
        const auto length = pick_length(rng);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(length);
        auto id = canonical_set_id(pool);
        if (!used.insert(id).second) {
            continue;
        }
        manifest.example_sets.push_back({std::move(id), std::move(pool), concept_spec.id});
    }
    if (manifest.example_sets.size() < options.set_count) {
        throw Error(ErrorCode::Capacity, "could only draw " +
                                             std::to_string(manifest.example_sets.size()) +
                                             " distinct example sets");
    }
    return manifest;
}

std::map<std::size_t, std::size_t> DatasetManifest::counts_by_length() const {
    std::map<std::size_t, std::size_t> out;
    for (const auto& s : example_sets) {
        ++out[s.length()];
    }
    return out;
}

nlohmann::json DatasetManifest::to_json() const {
    auto concepts_json = nlohmann::json::array();
    for (const auto& c : concepts) {
        concepts_json.push_back({{"id", c.id},
                                 {"label", c.label()},
                                 {"base", to_string(c.base)},
                                 {"transform", transforms_to_json(std::span(&c.transform, 1))[0]},
                                 {"extension", c.full_extension}});
    }
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [len, count] : counts_by_length()) {
        counts[std::to_string(len)] = count;
    }
    return {{"seed", seed},
            {"domain_max", domain_max},
            {"concepts", std::move(concepts_json)},
            {"example_sets", example_sets_to_json(example_sets)},
            {"counts_by_length", std::move(counts)}};
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& doc) {
    DatasetManifest m;
    try {
        m.seed = doc.at("seed").get<std::uint64_t>();
        m.domain_max = doc.at("domain_max").get<int>();
        for (const auto& c : doc.at("concepts")) {
            ConceptSpec spec;
            spec.id = c.at("id").get<std::string>();
            spec.base = parse_base_category(c.at("base").get<std::string>());
            spec.transform = transforms_from_json(nlohmann::json::array({c.at("transform")}))[0];
            spec.full_extension = c.at("extension").get<std::vector<int>>();
            m.concepts.push_back(std::move(spec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("manifest: ") + e.what());
    }
    auto sets = example_sets_from_json(doc, m.domain_max);
    m.example_sets = std::move(sets.sets);
    std::map<std::string, const ConceptSpec*> by_id;
    for (const auto& c : m.concepts) {
        by_id.emplace(c.id, &c);
    }
    for (const auto& s : m.example_sets) {
        if (!s.source_concept) {
            continue;
        }
        const auto it = by_id.find(*s.source_concept);
        if (it == by_id.end()) {
            throw Error(ErrorCode::Validation,
                        "set '" + s.id + "' references unknown concept '" + *s.source_concept + "'");
        }
        for (int x : s.examples) {
            if (!std::binary_search(it->second->full_extension.begin(),
                                    it->second->full_extension.end(), x)) {
                throw Error(ErrorCode::Validation, "set '" + s.id + "' is not a subset of concept '" +
                                                       it->second->id + "'");
            }
        }
    }
    return m;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    write_json_file(path, manifest.to_json());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    return DatasetManifest::from_json(parse_json_text(read_file(path), path));
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
}

} // namespace numgame
