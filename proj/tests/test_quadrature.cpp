#include "obstacle/error.hpp"
#include "obstacle/quadrature.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace obstacle;

namespace {

double tet_rule_mean(const TetRule& rule, int a, int b, int c, int d)
{
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        s += rule.weights[q] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c) * std::pow(l[3], d);
    }
    return s;
}

double tri_rule_mean(const TriRule& rule, int a, int b, int c)
{
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        s += rule.weights[q] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
    }
    return s;
}

} // namespace

TEST(Quadrature, OracleSanity)
{
    EXPECT_DOUBLE_EQ(oracle::tet_monomial_mean(1, 1, 1, 1), 1.0 / 840.0);
    EXPECT_DOUBLE_EQ(oracle::tet_monomial_mean(2, 0, 0, 0), 1.0 / 10.0);
    EXPECT_DOUBLE_EQ(oracle::tri_monomial_mean(1, 1, 0), 1.0 / 12.0);
    EXPECT_DOUBLE_EQ(oracle::tet_monomial_mean(0, 0, 0, 0), 1.0);
}

TEST(Quadrature, TetMonomialsExactUpToDegree)
{
    for (int degree = 1; degree <= kMaxQuadratureDegree; ++degree) {
        const TetRule& rule = tet_rule(degree);
        EXPECT_EQ(rule.degree, degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                for (int c = 0; a + b + c <= degree; ++c) {
                    for (int d = 0; a + b + c + d <= degree; ++d) {
                        const double exact = oracle::tet_monomial_mean(a, b, c, d);
                        EXPECT_NEAR(tet_rule_mean(rule, a, b, c, d), exact, 1e-12 * exact)
                            << "degree " << degree << " exponents " << a << b << c << d;
                    }
                }
            }
        }
    }
}

TEST(Quadrature, TriMonomialsExactUpToDegree)
{
    for (int degree = 1; degree <= kMaxQuadratureDegree; ++degree) {
        const TriRule& rule = tri_rule(degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                for (int c = 0; a + b + c <= degree; ++c) {
                    const double exact = oracle::tri_monomial_mean(a, b, c);
                    EXPECT_NEAR(tri_rule_mean(rule, a, b, c), exact, 1e-12 * exact);
                }
            }
        }
    }
}

TEST(Quadrature, RulePointsAreBarycentric)
{
    for (int degree = 1; degree <= kMaxQuadratureDegree; ++degree) {
        const TetRule& rule = tet_rule(degree);
        double wsum = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            wsum += rule.weights[q];
            double s = 0.0;
            for (double l : rule.points[q]) {
                EXPECT_GE(l, 0.0);
                EXPECT_LE(l, 1.0);
                s += l;
            }
            EXPECT_NEAR(s, 1.0, 1e-15);
        }
        EXPECT_NEAR(wsum, 1.0, 1e-14);
        const TriRule& tri = tri_rule(degree);
        double tsum = 0.0;
        for (double w : tri.weights) {
            tsum += w;
        }
        EXPECT_NEAR(tsum, 1.0, 1e-14);
    }
}

TEST(Quadrature, UnsupportedDegreesThrow)
{
    EXPECT_THROW(tet_rule(0), InputError);
    EXPECT_THROW(tet_rule(kMaxQuadratureDegree + 1), InputError);
    EXPECT_THROW(tri_rule(-1), InputError);
}

TEST(Quadrature, BubbleIntegralByMonteCarlo)
{
    // Independent check of 256/840 = 32/105 by sampling the reference tet.
    std::mt19937_64 rng(7);
    std::exponential_distribution<double> e(1.0);
    const int samples = 400000;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
        double l[4], s = 0.0;
        for (double& v : l) {
            v = e(rng);
            s += v;
        }
        sum += 256.0 * (l[0] / s) * (l[1] / s) * (l[2] / s) * (l[3] / s);
    }
    EXPECT_NEAR(sum / samples, 32.0 / 105.0, 3e-3);
    EXPECT_NEAR(256.0 * tet_rule_mean(tet_rule(4), 1, 1, 1, 1), 32.0 / 105.0, 1e-14);
}

TEST(Quadrature, PhysicalIntegrals)
{
    const TetMesh mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {Tet{{0, 1, 2, 3}}});
    EXPECT_NEAR(integrate_tet(mesh, 0, tet_rule(1), [](const Point3& p) { return p.x; }), 1.0 / 24.0, 1e-15);
    EXPECT_NEAR(integrate_tet(mesh, 0, tet_rule(2), [](const Point3& p) { return p.x * p.y; }), 1.0 / 120.0, 1e-15);
    const TetMesh scaled({{1, 1, 1}, {3, 1, 1}, {1, 3, 1}, {1, 1, 3}}, {Tet{{0, 1, 2, 3}}});
    EXPECT_NEAR(integrate_tet(scaled, 0, tet_rule(1), [](const Point3&) { return 1.0; }), 8.0 / 6.0, 1e-14);
    // (l1 l2 l3)^2 on a triangle face, degree 6.
    EXPECT_NEAR(tri_rule_mean(tri_rule(6), 2, 2, 2), oracle::tri_monomial_mean(2, 2, 2), 1e-16);
}
