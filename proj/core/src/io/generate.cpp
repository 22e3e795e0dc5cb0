#include "hyperfit/io/generate.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "hyperfit/errors.hpp"
#include "hyperfit/matrix_family.hpp"
#include "hyperfit/random.hpp"

namespace hyperfit::io {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& what) { throw InvalidArgument("generator: " + what); }

Eigen::VectorXd to_vector(const json& j) {
    if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
    if (!j.is_array() || j.empty()) bad("expected a number or a vector");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Eigen::MatrixXd to_matrix(const json& j, Eigen::Index dim) {
    if (j.is_number()) return j.get<double>() * Eigen::MatrixXd::Identity(dim, dim);
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) bad("matrix has the wrong number of rows");
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) bad("matrix rows must have " + std::to_string(dim) + " entries");
        for (Eigen::Index k = 0; k < dim; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

// Splits on '+' outside brackets.
std::vector<std::string_view> split_terms(std::string_view s) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == '+' && depth == 0 && i > 0 && s[i - 1] != 'e' && s[i - 1] != 'E') {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

struct Term {
    double weight = 1.0;
    bool weighted = false;
    char family = 0;
    json args;
};

Term parse_term(std::string_view t) {
    Term term;
    const auto open = t.find('(');
    if (open == std::string_view::npos || t.back() != ')') bad("cannot parse term '" + std::string(t) + "'");
    std::string_view head = trim(t.substr(0, open));
    if (const auto star = head.find('*'); star != std::string_view::npos) {
        const std::string w(trim(head.substr(0, star)));
        try {
            std::size_t used = 0;
            term.weight = std::stod(w, &used);
            if (used != w.size()) throw std::invalid_argument(w);
        } catch (const std::exception&) {
            bad("malformed weight '" + w + "'");
        }
        term.weighted = true;
        head = trim(head.substr(star + 1));
    }
    if (head.size() != 1 || (head[0] != 'N' && head[0] != 'C' && head[0] != 'M')) {
        bad("unknown distribution '" + std::string(head) + "' (expected N, C or M)");
    }
    term.family = head[0];
    try {
        term.args = json::parse("[" + std::string(t.substr(open + 1, t.size() - open - 2)) + "]");
    } catch (const json::exception&) {
        bad("malformed arguments in '" + std::string(t) + "'");
    }
    if (term.args.size() != 2) bad("each distribution takes two arguments");
    return term;
}

Component make_component(const Term& t) {
    const Eigen::VectorXd loc = to_vector(t.args[0]);
    if (t.family == 'N') {
        return GaussianComponent{loc, to_matrix(t.args[1], loc.size())};
    }
    if (loc.size() == 1) {
        const double v = t.args[1].get<double>();
        return CauchyComponent{loc, Eigen::MatrixXd::Constant(1, 1, v * v)};
    }
    return CauchyComponent{loc, to_matrix(t.args[1], loc.size())};
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) bad("covariance/scatter must be symmetric positive definite");
    return llt.matrixL();
}

}  // namespace

int GeneratorSpec::dim() const {
    if (kind == GeneratorKind::matrix_standard) return 0;
    return std::visit([](const auto& c) { return static_cast<int>(c.location_or_mean().size()); }, components.front());
}

void GeneratorSpec::validate() const {
    if (sample_size < 1) bad("sample size must be >= 1");
    if (kind == GeneratorKind::matrix_standard) {
        if (rows < 1 || cols < 1) bad("matrix dimensions must be >= 1");
        return;
    }
    if (components.empty() || weights.size() != components.size()) bad("one weight per component required");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) bad("mixture weights must sum to 1");
    const int d = dim();
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (!(weights[i] >= 0.0)) bad("weights must be nonnegative");
        std::visit(
            [&](const auto& c) {
                if (c.location_or_mean().size() != d) bad("all components must share one dimension");
                const Eigen::MatrixXd& s = c.shape();
                if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * s.cwiseAbs().maxCoeff()) {
                    bad("covariance/scatter must be symmetric");
                }
                cholesky_factor(s);
            },
            components[i]);
    }
}

GeneratorSpec parse_generator(std::string_view text, std::size_t sample_size, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.sample_size = sample_size;
    spec.seed = seed;
    const auto terms = split_terms(trim(text));
    std::vector<Term> parsed;
    for (auto t : terms) parsed.push_back(parse_term(t));

    if (parsed.size() == 1 && parsed[0].family == 'M') {
        spec.kind = GeneratorKind::matrix_standard;
        spec.rows = parsed[0].args[0].get<int>();
        spec.cols = parsed[0].args[1].get<int>();
        spec.validate();
        return spec;
    }
    for (const auto& t : parsed) {
        if (t.family == 'M') bad("M(...) cannot be mixed with other terms");
        if (parsed.size() > 1 && !t.weighted) bad("every mixture term needs a weight");
        spec.weights.push_back(t.weight);
        spec.components.push_back(make_component(t));
    }
    if (parsed.size() > 1) {
        spec.kind = GeneratorKind::mixture;
    } else if (parsed[0].family == 'N') {
        spec.kind = spec.dim() == 1 ? GeneratorKind::gaussian : GeneratorKind::gaussian_nd;
    } else {
        spec.kind = spec.dim() == 1 ? GeneratorKind::cauchy1d : GeneratorKind::mixture;
    }
    spec.validate();
    return spec;
}

Sample generate(const GeneratorSpec& spec, std::vector<int>* labels) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    if (spec.kind == GeneratorKind::matrix_standard) {
        MatrixData d{spec.rows, spec.cols, {}};
        d.values.reserve(spec.sample_size);
        for (std::size_t i = 0; i < spec.sample_size; ++i) {
            d.values.push_back(sample_standard_matrix(spec.cols, spec.rows, rng));
        }
        if (labels) labels->assign(spec.sample_size, 0);
        return d;
    }

    const int dim = spec.dim();
    std::vector<Eigen::MatrixXd> factors;
    for (const auto& c : spec.components) {
        factors.push_back(std::visit([](const auto& x) { return cholesky_factor(x.shape()); }, c));
    }
    std::vector<double> cumulative(spec.weights.size());
    std::partial_sum(spec.weights.begin(), spec.weights.end(), cumulative.begin());

    PointData d;
    d.rows.resize(static_cast<Eigen::Index>(spec.sample_size), dim);
    if (labels) labels->resize(spec.sample_size);
    Eigen::VectorXd z(dim);
    for (std::size_t i = 0; i < spec.sample_size; ++i) {
        std::size_t k = 0;
        if (spec.components.size() > 1) {
            const double u = uniform01(rng);
            while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
        }
        if (labels) (*labels)[i] = static_cast<int>(k);
        const Eigen::MatrixXd& l = factors[k];
        Eigen::VectorXd x;
        if (const auto* g = std::get_if<GaussianComponent>(&spec.components[k])) {
            for (int j = 0; j < dim; ++j) z(j) = standard_normal(rng);
            x = g->mean + l * z;
        } else {
            const auto& c = std::get<CauchyComponent>(spec.components[k]);
            if (dim == 1) {
                x = Eigen::VectorXd::Constant(1, cauchy(rng, c.location(0), l(0, 0)));
            } else {
                for (int j = 0; j < dim; ++j) z(j) = standard_normal(rng);
                x = c.location + l * z / std::abs(standard_normal(rng));
            }
        }
        d.rows.row(static_cast<Eigen::Index>(i)) = x.transpose();
    }
    return d;
}

}  // namespace hyperfit::io
