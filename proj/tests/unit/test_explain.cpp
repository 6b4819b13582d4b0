#include <algorithm>
#include <cmath>
#include <numeric>

#include "cspace/core/rng.hpp"
#include "cspace/explain/shap.hpp"
#include "helpers.hpp"

using namespace cspace;
using cspace::test::col;

namespace {

// Average marginal contribution over all m! orderings.
std::vector<double> permutation_shapley(const ModelFn& f, const std::vector<double>& x,
                                        const std::vector<double>& bg) {
    const std::size_t m = x.size();
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> phi(m, 0.0);
    double count = 0.0;
    do {
        std::vector<double> cur = bg;
        double prev = f(cur);
        for (auto j : perm) {
            cur[j] = x[j];
            const double next = f(cur);
            phi[j] += next - prev;
            prev = next;
        }
        count += 1.0;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (auto& p : phi) p /= count;
    return phi;
}

std::vector<std::string> names(std::size_t m) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < m; ++i) out.push_back("f" + std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("shapley_exact: linear model recovers coefficients") {
    const ModelFn f = [](std::span<const double> v) { return 3.0 * v[0] + 2.0 * v[1]; };
    const std::vector<double> x{1.0, 1.0}, bg{0.0, 0.0};
    const auto r = shapley_exact(f, x, bg, {"x1", "x2"});
    CHECK(r.attributions[0].phi == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.attributions[1].phi == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.attributions[0].rank == 1);
    CHECK(r.attributions[1].rank == 2);
}

TEST_CASE("shapley_exact: dummy and symmetry axioms") {
    const ModelFn only_first = [](std::span<const double> v) { return std::sin(v[0]) * 4.0; };
    const std::vector<double> x{1.0, 7.0}, bg{0.0, 0.0};
    CHECK(shapley_exact(only_first, x, bg, {"a", "b"}).attributions[1].phi == 0.0);

    const ModelFn sym = [](std::span<const double> v) { return v[0] + v[1]; };
    const std::vector<double> ones{1.0, 1.0};
    const auto r = shapley_exact(sym, ones, bg, {"a", "b"});
    CHECK(r.attributions[0].phi == doctest::Approx(1.0));
    CHECK(r.attributions[1].phi == doctest::Approx(1.0));

    const ModelFn interact = [](std::span<const double> v) { return v[0] * v[1] * v[2]; };
    const std::vector<double> x3{2.0, 2.0, 2.0}, bg3{0.0, 0.0, 0.0};
    const auto r3 = shapley_exact(interact, x3, bg3, {"a", "b", "c"});
    CHECK(r3.attributions[0].phi == doctest::Approx(r3.attributions[2].phi).epsilon(1e-14));
}

TEST_CASE("shapley_exact matches the permutation oracle and is efficient") {
    Rng rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 3);
        std::vector<double> w(m * m);
        for (auto& v : w) v = rng.normal();
        // Nonlinear model with pairwise interactions.
        const ModelFn f = [w, m](std::span<const double> v) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                s += w[i * m + i] * std::tanh(v[i]);
                for (std::size_t j = i + 1; j < m; ++j) s += w[i * m + j] * v[i] * v[j];
            }
            return s;
        };
        std::vector<double> x(m), bg(m);
        for (auto& v : x) v = rng.normal(0.0, 2.0);
        for (auto& v : bg) v = rng.normal();
        const auto got = shapley_exact(f, x, bg, names(m));
        const auto oracle = permutation_shapley(f, x, bg);
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(std::abs(got.attributions[j].phi - oracle[j]) <= 1e-9);
            sum += got.attributions[j].phi;
        }
        CHECK(std::abs(sum - (f(x) - f(bg))) <= 1e-9);
        CHECK(got.baseline == f(bg));
    }
}

TEST_CASE("shapley_exact: efficiency at twelve features, ranks form a permutation") {
    Rng rng(21);
    std::vector<double> w(12);
    for (auto& v : w) v = rng.normal();
    const ModelFn f = [&](std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < 12; ++i) s += w[i] * v[i] * v[(i + 1) % 12];
        return s;
    };
    std::vector<double> x(12), bg(12, 0.5);
    for (auto& v : x) v = rng.normal();
    const auto r = shapley_exact(f, x, bg, names(12));
    double sum = 0.0;
    std::vector<int> ranks;
    for (const auto& a : r.attributions) {
        sum += a.phi;
        ranks.push_back(a.rank);
    }
    CHECK(std::abs(sum + r.baseline - r.output) <= 1e-9);
    std::sort(ranks.begin(), ranks.end());
    for (int i = 0; i < 12; ++i) CHECK(ranks[static_cast<std::size_t>(i)] == i + 1);

    const std::vector<double> x13(13, 0.0);
    CHECK_ERROR(shapley_exact(f, x13, x13, names(13)), ErrorKind::TooManyFeatures);
}

TEST_CASE("global_importance") {
    Matrix phi(2, 2, std::vector<double>{1.0, -3.0, 1.0, 3.0});
    const auto g = global_importance({"a", "b"}, phi);
    CHECK(g[0].feature == "b");
    CHECK(g[0].score == 3.0);
    CHECK(g[1].score == 1.0);

    Matrix single(1, 3, std::vector<double>{0.5, -2.0, 1.0});
    const auto s = global_importance({"a", "b", "c"}, single);
    CHECK(s[0].feature == "b");
    CHECK(s[0].direction == Direction::Negative);
    CHECK(s[1].feature == "c");

    const auto z = global_importance({"z", "y", "x"}, Matrix(3, 3, 0.0));
    CHECK(z[0].feature == "x");
    CHECK(z[2].feature == "z");
    CHECK(z[0].score == 0.0);

    CHECK_ERROR(global_importance({"a"}, Matrix(0, 1)), ErrorKind::EmptyInput);
}

TEST_CASE("global_importance: direction follows value-attribution correlation") {
    // phi centred on zero, as with a mean background: a negative slope gives
    // negative phi for above-average values.
    Matrix values(4, 1, std::vector<double>{1.0, 2.0, 3.0, 4.0});
    Matrix phi(4, 1, std::vector<double>{1.6, 0.4, -0.5, -1.5});
    CHECK(global_importance({"a"}, phi, &values)[0].direction == Direction::Negative);
    Matrix pos(4, 1, std::vector<double>{-1.6, -0.4, 0.5, 1.4});
    CHECK(global_importance({"a"}, pos, &values)[0].direction == Direction::Positive);
}

TEST_CASE("correlation_importance") {
    Rng rng(13);
    std::vector<Cell> key, lin, anti, noise;
    for (int i = 0; i < 500; ++i) {
        const double k = rng.normal();
        key.push_back(k);
        lin.push_back(3.0 * k + 1.0);
        anti.push_back(-k + 0.3 * rng.normal());
        noise.push_back(rng.normal());
    }
    const DataTable t(test::ids(500), {col("key", key), col("noise", noise), col("anti", anti), col("lin", lin)});
    const auto r = correlation_importance(t, "key");
    REQUIRE(r.size() == 3);
    CHECK(r[0].feature == "lin");
    CHECK(r[0].score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r[1].feature == "anti");
    CHECK(r[1].direction == Direction::Negative);
    CHECK(std::abs(r[2].score) < 0.15);

    const DataTable constant(test::ids(3), {col("k", {1.0, 1.0, 1.0}), col("v", {1.0, 2.0, 3.0})});
    CHECK_ERROR(correlation_importance(constant, "k"), ErrorKind::UndefinedCorrelation);
    CHECK_ERROR(correlation_importance(t, "nope"), ErrorKind::Key);
}

TEST_CASE("factors_per_key") {
    CHECK(factors_per_key(1) == 15);
    CHECK(factors_per_key(3) == 5);
    CHECK(factors_per_key(7) == 2);
    CHECK(factors_per_key(15) == 1);
    CHECK_ERROR(factors_per_key(16), ErrorKind::TooManyKeyAttrs);
}

TEST_CASE("influencing_factors") {
    Rng rng(5);
    std::vector<Column> cols;
    for (int c = 0; c < 8; ++c) {
        std::vector<Cell> v;
        for (int i = 0; i < 40; ++i) v.push_back(rng.normal());
        cols.push_back(col("a" + std::to_string(c), v));
    }
    const DataTable t(test::ids(40), cols);
    InfluenceContext ctx{&t, {}};
    ctx.shap["a0"] = {{"a3", 4.0, Direction::Negative}, {"a1", 2.0, Direction::Positive}, {"a2", 1.0, Direction::Positive}};

    const auto set = influencing_factors({"a0", "a4", "a5"}, {{"a0", FactorSource::Predicted}}, ctx);
    CHECK(set.k == 5);
    REQUIRE(set.sectors.size() == 3);
    const auto& shap_sector = set.sectors.at("a0");
    REQUIRE(shap_sector.size() == 3);
    CHECK(shap_sector[0].name == "a3");
    CHECK(shap_sector[0].strength == 1.0);
    CHECK(shap_sector[0].direction == Direction::Negative);
    CHECK(shap_sector[1].strength == 0.5);
    for (const auto& [key, factors] : set.sectors) {
        CHECK(factors.size() <= 5);
        for (std::size_t i = 1; i < factors.size(); ++i) {
            CHECK(std::abs(factors[i].strength) <= std::abs(factors[i - 1].strength));
        }
        for (const auto& f : factors) {
            CHECK(f.name != key);
            CHECK(std::abs(f.strength) <= 1.0);
        }
    }
    // Key attributes may influence each other and appear in several sectors.
    const auto all = influencing_factors({"a4", "a5"}, {}, ctx);
    CHECK(all.k == 7);
    CHECK(all.sectors.at("a4").size() == 7);

    std::vector<std::string> many;
    for (int i = 0; i < 16; ++i) many.push_back("a0");
    CHECK_ERROR(influencing_factors(many, {}, ctx), ErrorKind::TooManyKeyAttrs);
    CHECK_ERROR(influencing_factors({"a1"}, {{"a1", FactorSource::Predicted}}, ctx), ErrorKind::Key);
}
