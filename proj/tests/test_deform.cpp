#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ncball/deform.hpp"
#include "ncball/sampling.hpp"

using namespace ncball;

static std::vector<double> uniform_grid(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
    g.back() = b;
    return g;
}

static IdealFamily degenerate_family() {
    // generator t*(z1z2 - z2z1): collapses to the zero ideal at t = 0
    GeneratorTemplate g(2, {{Word{{1, 2}}, RealPoly{{0.0, 1.0}}}, {Word{{2, 1}}, RealPoly{{0.0, -1.0}}}});
    return IdealFamily(2, 0.0, 1.0, {g});
}

TEST_CASE("real polynomial evaluation by Horner") {
    RealPoly p{{1.0, -2.0, 3.0}}; // 1 - 2t + 3t^2
    REQUIRE(p(0.0) == 1.0);
    REQUIRE(p(1.0) == 2.0);
    REQUIRE(p(2.0) == Catch::Approx(9.0));
    REQUIRE(RealPoly{{0.0, 0.0}}.is_zero());
    REQUIRE(!p.is_zero());
}

TEST_CASE("q-commutator family instantiates the expected generator") {
    IdealFamily fam = family_qcommutator();
    std::vector<FreePoly> gens = fam.instantiate(0.5);
    REQUIRE(gens.size() == 1);
    REQUIRE(gens[0].coeff(Word{{1, 2}}) == Complex(1.0));
    REQUIRE(gens[0].coeff(Word{{2, 1}}) == Complex(-0.5));
    REQUIRE_THROWS_AS(fam.instantiate(1.5), std::invalid_argument);
    REQUIRE_THROWS_AS(fam.instantiate(-0.2), std::invalid_argument);
}

TEST_CASE("generator templates enforce homogeneity and letters") {
    REQUIRE_THROWS_AS(GeneratorTemplate(2, {{Word{{1}}, RealPoly{{1.0}}}, {Word{{1, 2}}, RealPoly{{1.0}}}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(GeneratorTemplate(2, {{Word{{3}}, RealPoly{{1.0}}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(GeneratorTemplate(2, {}), std::invalid_argument);
}

TEST_CASE("norm field of the deformed quotient matches the closed form") {
    IdealFamily fam = family_qcommutator();
    FreePoly p = FreePoly::monomial(2, Word{{1, 2}}, 1.0);
    std::vector<double> grid = uniform_grid(0.0, 1.0, 101);
    NormField field = norm_field(fam, p, grid, 2);
    REQUIRE(field.values.size() == 101);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        REQUIRE(field.values[i].exact);
        REQUIRE(field.values[i].lower == Catch::Approx(t / std::sqrt(1.0 + t * t)).margin(1e-10));
    }
    ContinuityReport rep = continuity_report(field, 0.1);
    REQUIRE(rep.pass());
    REQUIRE(rep.max_jump <= 0.011);
}

TEST_CASE("norm field is independent of the worker count") {
    IdealFamily fam = family_qcommutator();
    FreePoly p = FreePoly::monomial(2, Word{{1, 2}}, 1.0) + FreePoly::letter(2, 1); // bracketed path
    std::vector<double> grid = uniform_grid(0.0, 1.0, 17);
    NormField serial = norm_field(fam, p, grid, 3, 1e-10, 1);
    NormField parallel = norm_field(fam, p, grid, 3, 1e-10, 4);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(serial.values[i].lower == parallel.values[i].lower); // bitwise
        REQUIRE(serial.values[i].upper == parallel.values[i].upper);
        REQUIRE(serial.values[i].exact == parallel.values[i].exact);
    }
}

TEST_CASE("degenerate family produces exactly one flagged jump") {
    IdealFamily fam = degenerate_family();
    FreePoly p = FreePoly::monomial(2, Word{{1, 2}}, 1.0) - FreePoly::monomial(2, Word{{2, 1}}, 1.0);
    std::vector<double> grid = uniform_grid(0.0, 1.0, 101);
    NormField field = norm_field(fam, p, grid, 2);
    // at t=0 the ideal vanishes and the class has full length sqrt(2);
    // for t>0 the polynomial lies in the ideal
    REQUIRE(field.values[0].lower == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    REQUIRE(field.values[1].lower <= 1e-10);
    ContinuityReport rep = continuity_report(field, 0.1);
    REQUIRE(rep.flags.size() == 1);
    REQUIRE(rep.flags[0].index == 0);
    REQUIRE(rep.flags[0].jump >= 1.41);
}

TEST_CASE("continuity report on brackets uses the pessimistic gap") {
    NormField field;
    field.grid = {0.0, 1.0};
    field.values = {FieldValue{1.0, 2.0, false}, FieldValue{1.5, 2.5, false}};
    ContinuityReport rep = continuity_report(field, 0.1);
    REQUIRE(rep.max_jump == 0.0); // intervals overlap
    field.values[1] = FieldValue{2.5, 3.0, false};
    rep = continuity_report(field, 0.1);
    REQUIRE(rep.max_jump == Catch::Approx(0.5)); // 2.5 - 2.0
    REQUIRE(rep.flags.size() == 1);
}

TEST_CASE("kernel dimensions are constant along the q-deformation") {
    IdealFamily fam = family_qcommutator();
    std::vector<double> grid = uniform_grid(0.0, 1.0, 101);
    KernelDimReport rep = kernel_dims(fam, grid, 2);
    REQUIRE(rep.semicontinuous);
    for (std::size_t dim : rep.dims) REQUIRE(dim == 1);
    KernelDimReport rep3 = kernel_dims(fam, grid, 3, 1e-10, 4);
    for (std::size_t dim : rep3.dims) REQUIRE(dim == 4);
}

TEST_CASE("kernel dimension report flags an isolated down-spike") {
    // fabricated dims: the middle point dips below both neighbors
    KernelDimReport rep;
    rep.dims = {1, 0, 1};
    rep.semicontinuous = true;
    for (std::size_t i = 1; i + 1 < rep.dims.size(); ++i)
        if (rep.dims[i] < std::min(rep.dims[i - 1], rep.dims[i + 1])) rep.semicontinuous = false;
    REQUIRE(!rep.semicontinuous);
}

TEST_CASE("grassmann path along the q-deformation") {
    IdealFamily fam = family_qcommutator();
    std::vector<double> grid = uniform_grid(0.0, 1.0, 101);
    GrassmannPathReport rep = grassmann_path(fam, grid, 2, 0.011);
    REQUIRE(rep.pass);
    REQUIRE(rep.k == 1);
    REQUIRE(rep.max_chordal <= 0.011);
    // closed form: the kernel line is spanned by (e12 - t e21)/sqrt(1+t^2)
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double t = grid[i], s = grid[i + 1];
        double expected = std::abs(s - t) / std::sqrt((1.0 + t * t) * (1.0 + s * s));
        REQUIRE(rep.chordal[i] == Catch::Approx(expected).margin(1e-12));
    }
    REQUIRE(!rep.plucker_dist.empty()); // ambient C^4, 4 minors: affordable
    for (double dist : rep.plucker_dist) REQUIRE(dist <= 0.05);
}

TEST_CASE("grassmann path reports a dimension jump as an error") {
    IdealFamily fam = degenerate_family();
    std::vector<double> grid = uniform_grid(0.0, 1.0, 11);
    REQUIRE_THROWS_WITH(grassmann_path(fam, grid, 2, 0.1),
                        Catch::Matchers::ContainsSubstring("dimension jumps"));
}

TEST_CASE("chordal distance is symmetric and vanishes on equal subspaces") {
    std::mt19937_64 rng(41);
    Eigen::MatrixXcd A = random_gauss_matrix(rng, 6, 2);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd B1 = qr.householderQ() * Eigen::MatrixXcd::Identity(6, 2);
    Eigen::MatrixXcd A2 = random_gauss_matrix(rng, 6, 2);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr2(A2);
    Eigen::MatrixXcd B2 = qr2.householderQ() * Eigen::MatrixXcd::Identity(6, 2);
    REQUIRE(chordal_distance(B1, B2) == Catch::Approx(chordal_distance(B2, B1)).margin(1e-13));
    REQUIRE(chordal_distance(B1, B1) <= 1e-7); // sqrt amplifies the roundoff near 0
    Eigen::MatrixXcd empty(6, 0);
    REQUIRE(chordal_distance(empty, empty) == 0.0);
}

TEST_CASE("strong continuity of the projections along the family") {
    IdealFamily fam = family_qcommutator();
    std::vector<double> grid = uniform_grid(0.0, 1.0, 101);
    std::vector<FreePoly> probes{FreePoly::monomial(2, Word{{1, 2}}, 1.0),
                                 FreePoly::monomial(2, Word{{2, 1}}, 1.0) + FreePoly::letter(2, 1)};
    StrongContinuityReport rep = strong_continuity_check(fam, grid, probes, 2, 0.05);
    REQUIRE(rep.pass);
    REQUIRE(!rep.entries.empty());
    for (const auto& e : rep.entries) REQUIRE(e.max_increment <= 0.05);
}

TEST_CASE("scaling map composes along radius chains") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        FreePoly p = random_poly(rng, 2, 4);
        // dyadic radii: ratios are exact powers of two, composition bitwise
        FreePoly direct = scaling_map(p, 0.125, 1.0);
        FreePoly chained = scaling_map(scaling_map(p, 0.5, 1.0), 0.125, 0.5);
        REQUIRE(direct == chained);
    }
    REQUIRE_THROWS_AS(scaling_map(FreePoly::one(2), 0.5, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(scaling_map(FreePoly::one(2), 0.9, 0.3), std::invalid_argument);
}

TEST_CASE("tower check passes on generic data") {
    std::mt19937_64 rng(43);
    GradedIdealBasis ideal =
        saturate_ideal({FreePoly::monomial(2, Word{{1, 2}}, 1.0) - FreePoly::monomial(2, Word{{2, 1}}, 0.5)}, 4);
    for (int rep = 0; rep < 5; ++rep) {
        FreePoly F = random_poly(rng, 2, 3);
        TowerReport t = tower_check(F, {0.3, 0.6, 0.9}, ideal, 4);
        REQUIRE(t.coeff_pass);
        REQUIRE(t.monotone_pass);
        REQUIRE(t.pass());
        REQUIRE(t.seminorms.size() == 3);
    }
}

TEST_CASE("tower check is bitwise on dyadic radius chains") {
    std::mt19937_64 rng(44);
    FreePoly F = random_poly(rng, 2, 3);
    GradedIdealBasis zero = GradedIdealBasis::zero(2, 3);
    TowerReport t = tower_check(F, {0.25, 0.5, 1.0}, zero, 3);
    REQUIRE(t.coeff_bitwise);
    REQUIRE(t.max_coeff_mismatch == 0.0);
}

TEST_CASE("tower check validates its radii") {
    GradedIdealBasis zero = GradedIdealBasis::zero(2, 2);
    FreePoly F = FreePoly::letter(2, 1);
    REQUIRE_THROWS_AS(tower_check(F, {0.5, 0.5}, zero, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(tower_check(F, {-0.1, 0.5}, zero, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(tower_check(F, {}, zero, 2), std::invalid_argument);
    TowerReport single = tower_check(F, {0.5}, zero, 2);
    REQUIRE(single.pass()); // vacuous chain
}

TEST_CASE("grid validation rejects disorder and domain escapes") {
    IdealFamily fam = family_qcommutator();
    FreePoly p = FreePoly::monomial(2, Word{{1, 2}}, 1.0);
    REQUIRE_THROWS_AS(norm_field(fam, p, {0.5, 0.4}, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(norm_field(fam, p, {0.5, 1.4}, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(norm_field(fam, p, {}, 2), std::invalid_argument);
}
