#include <doctest.h>

#include "cbicl/evalgen.h"
#include "cbicl/rng.h"

using namespace cbicl;

TEST_CASE("planted generator block structure without noise") {
    PlantedInstance inst = generate_planted(7, 6, 2, 0.0, 42);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 6; ++j) {
            double v = inst.A.A(i, j);
            if (inst.row_truth[i] == inst.col_truth[j]) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            } else {
                CHECK(v == 0.0);
            }
        }
    // near-even sizes
    std::vector<int> counts(3, 0);
    for (int lab : inst.row_truth) counts[lab]++;
    CHECK(std::abs(counts[1] - counts[2]) <= 1);
}

TEST_CASE("planted generator degenerate and deterministic") {
    PlantedInstance tiny = generate_planted(3, 3, 3, 0.0, 9);
    for (int lab = 1; lab <= 3; ++lab) {
        CHECK(std::count(tiny.row_truth.begin(), tiny.row_truth.end(), lab) == 1);
        CHECK(std::count(tiny.col_truth.begin(), tiny.col_truth.end(), lab) == 1);
    }
    PlantedInstance a = generate_planted(10, 8, 2, 0.25, 77);
    PlantedInstance b = generate_planted(10, 8, 2, 0.25, 77);
    CHECK(arma::approx_equal(a.A.A, b.A.A, "absdiff", 0.0));
    CHECK_THROWS(generate_planted(2, 5, 3, 0.0, 1));
}

TEST_CASE("round_half_up") {
    CHECK(round_half_up(48.25) == 48);
    CHECK(round_half_up(96.5) == 97);
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(193.0 / 4.0) == 48); // the 193-row quota
    CHECK(round_half_up(193.0 / 2.0) == 97);
}

TEST_CASE("sampled constraints honor truth when violation_frac is zero") {
    PlantedInstance inst = generate_planted(12, 10, 2, 0.25, 5);
    ConstraintQuotas q{4, 4, 3, 3};
    PairwiseConstraints con = sample_constraints(inst.row_truth, inst.col_truth, q, 0.0, 13);
    CHECK(con.ml_u.size() == 4);
    CHECK(con.cl_u.size() == 4);
    CHECK(con.ml_v.size() == 3);
    CHECK(con.cl_v.size() == 3);
    for (const auto& [i, j] : con.ml_u) CHECK(inst.row_truth[i - 1] == inst.row_truth[j - 1]);
    for (const auto& [i, j] : con.cl_u) CHECK(inst.row_truth[i - 1] != inst.row_truth[j - 1]);
    for (const auto& [i, j] : con.ml_v) CHECK(inst.col_truth[i - 1] == inst.col_truth[j - 1]);
    for (const auto& [i, j] : con.cl_v) CHECK(inst.col_truth[i - 1] != inst.col_truth[j - 1]);
    Biclustering truth(2, inst.row_truth, inst.col_truth);
    CHECK(check_feasible(truth, con));
}

TEST_CASE("violation_frac=1 flips every constraint") {
    PlantedInstance inst = generate_planted(10, 10, 2, 0.25, 8);
    ConstraintQuotas q{3, 3, 0, 0};
    PairwiseConstraints con = sample_constraints(inst.row_truth, inst.col_truth, q, 1.0, 21);
    for (const auto& [i, j] : con.ml_u) CHECK(inst.row_truth[i - 1] != inst.row_truth[j - 1]);
    for (const auto& [i, j] : con.cl_u) CHECK(inst.row_truth[i - 1] == inst.row_truth[j - 1]);
}

TEST_CASE("constraint quota larger than the pair pool errors") {
    std::vector<int> truth{1, 2};
    ConstraintQuotas q{3, 0, 0, 0};
    CHECK_THROWS(sample_constraints(truth, truth, q, 0.0, 0));
}

TEST_CASE("ari basics") {
    std::vector<int> a{1, 1, 2, 2};
    CHECK(ari(a, a) == doctest::Approx(1.0));
    // all-in-one vs two balanced clusters: contingency 1x2 with rows [2,2]
    std::vector<int> ones{1, 1, 1, 1};
    CHECK(ari(ones, a) == doctest::Approx(0.0));
    std::vector<int> permuted{2, 2, 1, 1};
    CHECK(ari(a, permuted) == doctest::Approx(1.0));
    // symmetry
    std::vector<int> b{1, 2, 2, 2};
    CHECK(ari(a, b) == doctest::Approx(ari(b, a)));
}

TEST_CASE("nmi basics and conventions") {
    std::vector<int> a{1, 1, 2, 2, 3, 3};
    CHECK(nmi(a, a) == doctest::Approx(1.0));
    std::vector<int> single{1, 1, 1, 1, 1, 1};
    CHECK(nmi(single, a) == doctest::Approx(0.0));
    CHECK(nmi(single, single) == doctest::Approx(0.0));
    std::vector<int> b{2, 2, 3, 3, 1, 1};
    CHECK(nmi(a, b) == doctest::Approx(1.0)); // relabel invariance
    CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)));
}

TEST_CASE("nmi of independent labelings is small") {
    Rng rng(1234);
    int high = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> a(1000), b(1000);
        for (auto& v : a) v = rng.uniform_int(3);
        for (auto& v : b) v = rng.uniform_int(3);
        if (nmi(a, b) > 0.1) high++;
    }
    CHECK(high == 0);
}

TEST_CASE("oracle on the 2x2 identity instance") {
    WeightMatrix A(arma::mat{{1.0, 0.0}, {0.0, 1.0}});
    PairwiseConstraints con;
    OracleResult res = brute_force_optimum(A, con, 2);
    REQUIRE_FALSE(res.infeasible());
    CHECK(res.objective == doctest::Approx(2.0));
    CHECK(check_feasible(*res.best, con));
}

TEST_CASE("oracle agrees with preprocess infeasibility") {
    WeightMatrix A(arma::mat(3, 3, arma::fill::ones));
    PairwiseConstraints con;
    con.add(con.ml_u, 1, 2);
    con.add(con.cl_u, 1, 2);
    OracleResult res = brute_force_optimum(A, con, 2);
    CHECK(res.infeasible());
}

TEST_CASE("oracle guards its size limit") {
    WeightMatrix A(arma::mat(9, 3, arma::fill::ones));
    PairwiseConstraints con;
    CHECK_THROWS(brute_force_optimum(A, con, 2));
}

TEST_CASE("adding constraints never improves the oracle optimum") {
    Rng rng(55);
    for (int trial = 0; trial < 12; ++trial) {
        PlantedInstance inst = generate_planted(5, 5, 2, 0.25, 100 + trial);
        PairwiseConstraints none;
        OracleResult base = brute_force_optimum(inst.A, none, 2);
        REQUIRE_FALSE(base.infeasible());
        ConstraintQuotas q{1, 1, 1, 1};
        PairwiseConstraints con =
            sample_constraints(inst.row_truth, inst.col_truth, q, 0.3, 200 + trial);
        OracleResult constrained = brute_force_optimum(inst.A, con, 2);
        if (!constrained.infeasible()) {
            CHECK(constrained.objective <= base.objective + 1e-9);
            CHECK(check_feasible(*constrained.best, con));
            // one more nesting level
            PairwiseConstraints more = con;
            ConstraintQuotas q2{1, 0, 0, 1};
            PairwiseConstraints extra =
                sample_constraints(inst.row_truth, inst.col_truth, q2, 0.0, 300 + trial);
            for (const auto& p : extra.ml_u) more.ml_u.insert(p);
            for (const auto& p : extra.cl_v) more.cl_v.insert(p);
            OracleResult deeper = brute_force_optimum(inst.A, more, 2);
            if (!deeper.infeasible())
                CHECK(deeper.objective <= constrained.objective + 1e-9);
        }
    }
}

TEST_CASE("oracle objective matches total_density of its own solution") {
    Rng rng(66);
    for (int trial = 0; trial < 8; ++trial) {
        PlantedInstance inst = generate_planted(5, 6, 2, 0.25, 400 + trial);
        OracleResult res = brute_force_optimum(inst.A, PairwiseConstraints{}, 2);
        REQUIRE_FALSE(res.infeasible());
        CHECK(res.objective == doctest::Approx(total_density(inst.A, *res.best)));
    }
}
