#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phytotron/references.hpp"

using namespace phyto;
using Catch::Approx;

TEST_CASE("daily reference anchor points") {
  const auto mid = reference_at(0.0);
  CHECK(mid.T_ref == Approx(17.0).margin(1e-12));
  CHECK(mid.C_ref == Approx(7.25e-4).margin(1e-15));
  for (int j = 6; j < kNumInputs; ++j) CHECK(mid.u_ref[j] == Approx(0.0).margin(1e-12));
  for (int j = 0; j < 6; ++j) CHECK(mid.u_ref[j] == 0.0);

  const auto noon = reference_at(43200.0);
  CHECK(noon.T_ref == Approx(23.0).margin(1e-12));
  CHECK(noon.C_ref == Approx(1.085e-3).margin(1e-15));
  CHECK(noon.u_ref[6] == Approx(100.0).margin(1e-12));

  const auto six = reference_at(21600.0);
  CHECK(six.T_ref == Approx(20.0).margin(1e-12));
  CHECK(six.C_ref == Approx(9.05e-4).margin(1e-15));
  CHECK(six.u_ref[9] == Approx(50.0).margin(1e-12));
}

TEST_CASE("references are periodic over one day") {
  for (double t : {0.0, 1234.5, 43200.0, 80000.0}) {
    const auto a = reference_at(t);
    const auto b = reference_at(t + 86400.0);
    CHECK(std::abs(a.T_ref - b.T_ref) < 1e-9);
    CHECK(std::abs(a.C_ref - b.C_ref) < 1e-9);
    CHECK(std::abs(a.u_ref[6] - b.u_ref[6]) < 1e-9);
  }
}

TEST_CASE("peaks of all reference channels coincide at noon") {
  double best_t = 0, best_T = -1e9, best_C = -1e9, best_led = -1e9;
  double best_tC = 0, best_tled = 0;
  for (int k = 0; k < 2880; ++k) {
    const double t = k * 30.0;
    const auto s = reference_at(t);
    if (s.T_ref > best_T) { best_T = s.T_ref; best_t = t; }
    if (s.C_ref > best_C) { best_C = s.C_ref; best_tC = t; }
    if (s.u_ref[6] > best_led) { best_led = s.u_ref[6]; best_tled = t; }
  }
  CHECK(best_t == 43200.0);
  CHECK(best_tC == 43200.0);
  CHECK(best_tled == 43200.0);
}

TEST_CASE("reference samples stay inside their documented bands") {
  for (int k = 0; k < 2880; ++k) {
    const auto s = reference_at(k * 30.0);
    REQUIRE(s.T_ref >= 17.0);
    REQUIRE(s.T_ref <= 23.0);
    REQUIRE(s.C_ref >= 7.25e-4);
    REQUIRE(s.C_ref <= 1.085e-3);
    for (int j = 6; j < kNumInputs; ++j) {
      REQUIRE(s.u_ref[j] >= 0.0);
      REQUIRE(s.u_ref[j] <= 100.0);
    }
  }
}

TEST_CASE("reference window matches pointwise calls and wraps midnight") {
  const auto w = reference_window(86400.0 - 30.0, 2, 30.0);
  REQUIRE(w.size() == 3);
  CHECK(w[0].T_ref == reference_at(86370.0).T_ref);
  CHECK(w[1].T_ref == reference_at(86400.0).T_ref);
  CHECK(w[2].T_ref == reference_at(86430.0).T_ref);
  // Wrap continuity: the sample after midnight sits close to the one before.
  CHECK(std::abs(w[2].T_ref - w[0].T_ref) < 1e-4);

  const auto w2 = reference_window(0.0, 1, 30.0);
  REQUIRE(w2.size() == 2);
  CHECK(w2[0].C_ref == reference_at(0.0).C_ref);
  CHECK(w2[1].C_ref == reference_at(30.0).C_ref);
}
