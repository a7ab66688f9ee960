#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rotex/exact_checks.hpp"
#include "rotex/model.hpp"

using namespace rotex;

TEST(Configuration, StringAndBitsAgree) {
  const auto a = Configuration::from_string(3, "110000001");
  const auto b = Configuration::from_bits(3, 0b100000011);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.to_string(), "110000001");
  EXPECT_EQ(a.particle_count(), 3u);
  EXPECT_THROW(Configuration::from_string(3, "11"), std::invalid_argument);
  EXPECT_THROW(Configuration::from_string(3, "11000000x"), std::invalid_argument);
}

TEST(Configuration, TranslateMovesParticles) {
  const TorusLattice lat(3);
  const auto eta = Configuration::from_string(3, "100000000");
  const auto moved = translate(lat, eta, {1, 2});
  EXPECT_EQ(moved.at(lat, {1, 2}), 1);
  EXPECT_EQ(moved.particle_count(), 1u);
}

TEST(FaceRule, ActivatedPatterns) {
  const FaceRule<double> rule{0.3, RateMutation::None};
  for (FacePattern p = 0; p < 16; ++p) {
    const double expected = (p == 0b0101 || p == 0b1010) ? 0.3 : 0.0;
    EXPECT_EQ(rule(p), expected) << p;
  }
  const FaceRule<double> doubled{0.3, RateMutation::DoubleMainDiagonal};
  EXPECT_EQ(doubled(0b0101), 0.6);
  EXPECT_EQ(doubled(0b1010), 0.3);
  const FaceRule<double> adjacent{0.3, RateMutation::AdjacentPairFires};
  EXPECT_EQ(adjacent(0b0011), 0.3);
}

TEST(FaceRule, MutationNames) {
  for (auto m : {RateMutation::None, RateMutation::DoubleMainDiagonal, RateMutation::AdjacentPairFires})
    EXPECT_EQ(parse_mutation(to_string(m)), m);
  EXPECT_THROW(parse_mutation("bogus"), std::invalid_argument);
}

// Two particles at (0,0) and (1,0); the particle at the origin moves up. The
// reverse jump sees an activated anti-diagonal on the face at the origin.
TEST(Rates, HandComputedWitness) {
  const TorusLattice lat(3);
  const FaceRule<Rational> rule{Rational(1, 2), RateMutation::None};
  const auto eta = Configuration::from_string(3, "110000000");
  const DirectedEdge e{{0, 0}, Dir::North};
  EXPECT_EQ(jump_rate(lat, eta, e, rule), Rational(1));
  const auto after = swap(lat, eta, e);
  EXPECT_EQ(after.to_string(), "010100000");
  EXPECT_EQ(face_pattern(lat, after, {0, 0}), kDiagonalAnti);
  EXPECT_EQ(jump_rate(lat, after, lat.reverse(e), rule), Rational(3, 2));
}

TEST(Rates, ExclusionAndNonNegativity) {
  const TorusLattice lat(3);
  const ModelParams params(-0.9);
  for (std::uint64_t b = 0; b < 512; ++b) {
    const auto eta = Configuration::from_bits(3, b);
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
      for (Dir d : kAllDirs) {
        const DirectedEdge e{lat.vertex(k), d};
        const double c = jump_rate(lat, eta, e, params);
        EXPECT_GE(c, 0.0);
        if (!eta.at(lat, e.tail) || eta.at(lat, lat.head(e))) {
          EXPECT_EQ(c, 0.0);
        }
      }
    }
  }
}

TEST(Rates, AlphaZeroIsSimpleExclusion) {
  const TorusLattice lat(4);
  const ModelParams params(0.0);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto eta = Configuration::from_bits(4, rng() & 0xFFFF);
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
      for (Dir d : kAllDirs) {
        const DirectedEdge e{lat.vertex(k), d};
        const double expected = eta.at(lat, e.tail) * (1.0 - eta.at(lat, lat.head(e)));
        EXPECT_EQ(jump_rate(lat, eta, e, params), expected);
      }
    }
  }
}

TEST(Rates, TranslationCovariant) {
  const TorusLattice lat(4);
  const FaceRule<Rational> rule{Rational(-3, 4), RateMutation::None};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto eta = Configuration::from_bits(4, rng() & 0xFFFF);
    const Vertex z{static_cast<int>(rng() % 4), static_cast<int>(rng() % 4)};
    const auto moved = translate(lat, eta, z);
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
      for (Dir d : kAllDirs) {
        const DirectedEdge e{lat.vertex(k), d};
        EXPECT_EQ(jump_rate(lat, eta, e, rule), jump_rate(lat, moved, lat.translate(e, z), rule));
      }
    }
  }
}

TEST(Rates, FieldMultipliesRate) {
  const TorusLattice lat(3);
  DiscreteVectorField h(3);
  for (std::size_t id = 0; id < h.size(); ++id) h[id] = 0.01 * static_cast<double>(id) - 0.1;
  const ModelParams plain(0.5), driven(0.5, h);
  for (std::uint64_t b = 0; b < 512; b += 7) {
    const auto eta = Configuration::from_bits(3, b);
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
      for (Dir d : kAllDirs) {
        const DirectedEdge e{lat.vertex(k), d};
        EXPECT_NEAR(jump_rate(lat, eta, e, driven), jump_rate(lat, eta, e, plain) * std::exp(h.at(lat, e)), 1e-15);
      }
    }
  }
}

TEST(Rates, CurrentSplitAddsUp) {
  const TorusLattice lat(3);
  const ModelParams params(0.5);
  for (std::uint64_t b = 0; b < 512; ++b) {
    const auto eta = Configuration::from_bits(3, b);
    const auto j = current_field(lat, eta, params);
    for (std::size_t id = 0; id < lat.num_edges(); ++id) {
      const auto s = instantaneous_current(lat, eta, lat.canonical_edge(id), params);
      EXPECT_DOUBLE_EQ(s.total, s.grad_part + s.circ_part);
      EXPECT_DOUBLE_EQ(j[id], s.total);
    }
  }
}

TEST(Rates, CurrentSplitNeedsUnperturbedModel) {
  const TorusLattice lat(3);
  const ModelParams driven(0.5, DiscreteVectorField(3));
  EXPECT_THROW(instantaneous_current(lat, Configuration(3), {{0, 0}, Dir::East}, driven), std::invalid_argument);
}

TEST(ModelParams, AlphaRange) {
  EXPECT_THROW(ModelParams(1.0), std::invalid_argument);
  EXPECT_THROW(ModelParams(-1.0), std::invalid_argument);
  EXPECT_THROW(ModelParams(std::nan("")), std::invalid_argument);
  EXPECT_NO_THROW(ModelParams(0.99));
}
