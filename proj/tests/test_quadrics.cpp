#include <Eigen/Dense>

#include "doctest.h"
#include "fixtures.hpp"
#include "oica/experiments.hpp"
#include "oica/identifiability.hpp"
#include "oica/quadrics.hpp"
#include "oica/rng.hpp"

using namespace oica;

TEST_SUITE_BEGIN("quadrics");

namespace {

// fixture tables list pair coefficients in row-major order; repack to colex
Eigen::VectorXd rowmajor_to_packed(const Eigen::VectorXd& row, int I) {
  Eigen::VectorXd out(pair_count(I));
  int t = 0;
  for (int i = 0; i < I; ++i)
    for (int j = i; j < I; ++j) out[pair_index(i, j)] = row[t++];
  return out;
}

int stacked_rank(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd M(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) M.row(r) = rows[r].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv[rank] > 1e-9 * sv[0]) ++rank;
  return rank;
}

}  // namespace

TEST_CASE("linear relations of the 4x6 fixture span the known system") {
  const auto rels = linear_relations(fixtures::id_4x6());
  REQUIRE(rels.size() == 4);

  std::vector<Eigen::VectorXd> stacked = rels;
  const Eigen::MatrixXd expected = fixtures::relations_4x6_rowmajor();
  for (int r = 0; r < 4; ++r)
    stacked.push_back(rowmajor_to_packed(expected.row(r).transpose(), 4));
  CHECK(stacked_rank(stacked) == 4);  // same row space
}

TEST_CASE("full squared-column span leaves no relations") {
  CHECK(linear_relations(fixtures::nonid_2x3()).empty());
}

TEST_CASE("identity 2x2 has the single off-diagonal relation") {
  const auto rels = linear_relations(Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(rels.size() == 1);
  CHECK(std::abs(rels[0][pair_index(0, 1)]) == doctest::Approx(1.0));
  CHECK(std::abs(rels[0][pair_index(0, 0)]) < 1e-12);
  CHECK(std::abs(rels[0][pair_index(1, 1)]) < 1e-12);
}

TEST_CASE("quadrics vanish on the columns") {
  const Eigen::MatrixXd A = fixtures::id_4x6();
  const QuadricSystem sys = quadric_system(A);
  CHECK(sys.forms.size() == 4);
  for (int j = 0; j < 6; ++j) {
    const Eigen::VectorXd r = evaluate<double>(sys, A.col(j));
    CHECK(r.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("quadric span equals the example system") {
  const QuadricSystem sys = quadric_system(fixtures::id_4x6());
  // f1 = x1x2 - x2x3 + x2x4, f2 = x1x3 - x2x3 + x2x4,
  // f3 = x1x2 - x2x3 + x3x4, f4 = x1x4
  std::vector<Eigen::VectorXd> stacked = sys.forms;
  const Eigen::MatrixXd expected = fixtures::relations_4x6_rowmajor();
  for (int r = 0; r < 4; ++r)
    stacked.push_back(rowmajor_to_packed(expected.row(r).transpose(), 4));
  CHECK(stacked_rank(stacked) == 4);
}

TEST_CASE("witness of the 2x3 fixture annihilates its quadrics") {
  const QuadricSystem sys = quadric_system(fixtures::nonid_2x3());
  Eigen::VectorXd b(2);
  b << 1, 2;
  const Eigen::VectorXd r = evaluate<double>(sys, b);
  CHECK((r.size() == 0 || r.cwiseAbs().maxCoeff() < 1e-10));
}

TEST_CASE("duality between quadric values and packed orthogonality") {
  Rng rng(31);
  for (int I : {3, 4, 6}) {
    const MixingMatrix A = generate_mixing(I, I + 1, 600 + I);
    const auto rels = linear_relations(A.matrix());
    const QuadricSystem sys = quadric_system(A.matrix());
    for (int rep = 0; rep < 5; ++rep) {
      const Eigen::VectorXd b = rng.normal_vec(I);
      const Eigen::VectorXd vals = evaluate<double>(sys, b);
      const Eigen::VectorXd pb = outer_square(b).data();
      for (size_t k = 0; k < rels.size(); ++k)
        CHECK(vals[static_cast<int>(k)] == doctest::Approx(rels[k].dot(pb)).epsilon(1e-10));
    }
  }
}

TEST_CASE("evaluate basics") {
  const QuadricSystem sys = quadric_system(fixtures::id_4x6());
  CHECK(evaluate<double>(sys, Eigen::VectorXd::Zero(4)).cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXd a5(4);
  a5 << 1, 1, 1, 0;
  CHECK(evaluate<double>(sys, a5).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(evaluate<double>(sys, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("realcount base cases") {
  const TrackedSystem t2 = build_real_count_system(2, 2);
  REQUIRE(t2.system.forms.size() == 1);
  CHECK(t2.real_count == 2);
  REQUIRE(t2.solutions.size() == 2);
  // {x^2 - 1}: value 3 at x = 2
  Eigen::VectorXd x(1);
  x << 2;
  CHECK(evaluate<double>(t2.system, x)[0] == doctest::Approx(3.0));

  const TrackedSystem t0 = build_real_count_system(2, 0);
  CHECK(t0.real_count == 0);
  for (const auto& s : t0.solutions) CHECK(std::abs(s[0].imag()) == doctest::Approx(1.0));
}

TEST_CASE("realcount I=3 with two real solutions") {
  const TrackedSystem ts = build_real_count_system(3, 2);
  CHECK(ts.system.forms.size() == 2);
  CHECK(ts.solutions.size() == 4);
  CHECK(ts.real_count == 2);
  for (const auto& s : ts.solutions) {
    const Eigen::VectorXcd r = evaluate<std::complex<double>>(ts.system, s);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("tracked systems satisfy their invariants") {
  for (int I = 2; I <= 6; ++I) {
    for (int ell = 0; ell <= (1 << (I - 1)); ell += 2) {
      CAPTURE(I);
      CAPTURE(ell);
      const TrackedSystem ts = build_real_count_system(I, ell);
      CHECK(static_cast<int>(ts.system.forms.size()) == I - 1);
      CHECK(ts.system.nvars == I - 1);
      REQUIRE(static_cast<long long>(ts.solutions.size()) == (1LL << (I - 1)));
      CHECK(ts.real_count == ell);

      int reals = 0;
      double max_resid = 0.0;
      for (const auto& s : ts.solutions) {
        bool is_real = true;
        for (int i = 0; i < s.size(); ++i)
          if (std::abs(s[i].imag()) > 1e-8) is_real = false;
        reals += is_real ? 1 : 0;
        max_resid =
            std::max(max_resid, evaluate<std::complex<double>>(ts.system, s).cwiseAbs().maxCoeff());
      }
      CHECK(reals == ell);
      CHECK(max_resid < 1e-8);

      double min_dist = std::numeric_limits<double>::infinity();
      for (size_t a = 0; a < ts.solutions.size(); ++a)
        for (size_t b = a + 1; b < ts.solutions.size(); ++b)
          min_dist = std::min(min_dist, (ts.solutions[a] - ts.solutions[b]).norm());
      CHECK(min_dist > 1e-6);

      // count law along the construction trace
      for (const auto& step : ts.trace) {
        if (step.branch == 'D') CHECK(step.real_after == 2 * step.real_before);
        if (step.branch == 'C') CHECK(step.real_after == 2 * step.real_before - 2);
      }
    }
  }
}

TEST_CASE("invalid real counts are rejected") {
  CHECK_THROWS_AS(build_real_count_system(3, 3), Error);
  CHECK_THROWS_AS(build_real_count_system(3, 6), Error);
  CHECK_THROWS_AS(build_real_count_system(3, -2), Error);
}

TEST_SUITE_END();
