#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "leggett/geometry.hpp"
#include "leggett/inequality.hpp"

using namespace leggett;

namespace {

const double kPhiMax = optimal_angle(2).phi;

void expect_vec(const UnitVec3& v, double x, double y, double z, double tol = 1e-10)
{
    EXPECT_NEAR(v.x(), x, tol);
    EXPECT_NEAR(v.y(), y, tol);
    EXPECT_NEAR(v.z(), z, tol);
}

PlaneFrame random_frame(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    const UnitVec3 e1 = UnitVec3::normalized({g(rng), g(rng), g(rng)});
    Vec3 w{g(rng), g(rng), g(rng)};
    w = w - dot(w, e1) * e1.vec();
    return PlaneFrame(e1, UnitVec3::normalized(w));
}

} // namespace

TEST(UnitVec3, RejectsNonUnitComponents)
{
    EXPECT_THROW(UnitVec3::from_components(1.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(UnitVec3::normalized({0.0, 0.0, 0.0}), DomainError);
    EXPECT_NO_THROW(UnitVec3::from_components(0.6, 0.8, 0.0));
}

TEST(PlaneFrame, NormalIsRightHanded)
{
    expect_vec(PlaneFrame::xy().normal(), 0, 0, 1);
    expect_vec(PlaneFrame::yz().normal(), 1, 0, 0);
    EXPECT_THROW(PlaneFrame(UnitVec3::x_axis(), UnitVec3::x_axis()), DomainError);
}

TEST(RotateInPlane, Examples)
{
    const PlaneFrame xy = PlaneFrame::xy();
    expect_vec(rotate_in_plane(xy, 0.0), 1, 0, 0);
    // Bob's b1 and b2.
    expect_vec(rotate_in_plane(xy, kPhiMax), std::cos(kPhiMax), std::sin(kPhiMax), 0);
    expect_vec(rotate_in_plane(xy, std::numbers::pi / 2 + kPhiMax), -std::sin(kPhiMax), std::cos(kPhiMax), 0);
}

TEST(RotateInPlane, StaysUnitAndInPlane)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const PlaneFrame f = random_frame(rng);
        const UnitVec3 v = rotate_in_plane(f, ang(rng));
        EXPECT_NEAR(norm(v), 1.0, 1e-12);
        EXPECT_NEAR(dot(v, f.normal()), 0.0, 1e-12);
    }
}

TEST(AngleBetween, Examples)
{
    const auto layout = canonical_layout(2, kPhiMax);
    const UnitVec3 a1 = UnitVec3::x_axis();
    const UnitVec3 a2 = UnitVec3::y_axis();
    EXPECT_NEAR(angle_between(a1, a1), 0.0, 1e-12);
    EXPECT_NEAR(angle_between(a1, layout.group(Group::phi_1)[0].b), kPhiMax, 1e-10);
    EXPECT_NEAR(angle_between(a1, a2), std::numbers::pi / 2, 1e-15);
    // clamping absorbs a dot product that drifts past 1
    const UnitVec3 tilted = UnitVec3::normalized({1.0, 1e-9, 0.0});
    EXPECT_FALSE(std::isnan(angle_between(tilted, tilted)));
}

TEST(CanonicalLayout, ReproducesReferenceSettingsForNTwo)
{
    const auto L = canonical_layout(2, kPhiMax);
    const double c = std::cos(kPhiMax), s = std::sin(kPhiMax);
    // Alice: a1 a2 in plane 1, a2 a3 in plane 2.
    expect_vec(L.group(Group::phi_1)[0].a, 1, 0, 0);
    expect_vec(L.group(Group::phi_1)[1].a, 0, 1, 0);
    expect_vec(L.group(Group::phi_2)[0].a, 0, 1, 0);
    expect_vec(L.group(Group::phi_2)[1].a, 0, 0, 1);
    // Bob: b1..b4 then b5 = a1, b6 = a2, b7 = a3.
    expect_vec(L.group(Group::phi_1)[0].b, c, s, 0);
    expect_vec(L.group(Group::phi_1)[1].b, -s, c, 0);
    expect_vec(L.group(Group::phi_2)[0].b, 0, c, -s);
    expect_vec(L.group(Group::phi_2)[1].b, 0, s, c);
    expect_vec(L.group(Group::zero_1)[0].b, 1, 0, 0);
    expect_vec(L.group(Group::zero_1)[1].b, 0, 1, 0);
    expect_vec(L.group(Group::zero_2)[0].b, 0, 1, 0);
    expect_vec(L.group(Group::zero_2)[1].b, 0, 0, 1);
}

TEST(CanonicalLayout, DistinctPairsMatchTableLabels)
{
    const auto pairs = distinct_pairs(canonical_layout(2, kPhiMax));
    ASSERT_EQ(pairs.size(), 7u);
    const std::vector<std::string> labels{"E11", "E22", "E15", "E26", "E23", "E34", "E37"};
    std::set<int> alice, bob;
    std::size_t slots = 0;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        EXPECT_EQ(pairs[j].label(), labels[j]);
        alice.insert(pairs[j].alice_index);
        bob.insert(pairs[j].bob_index);
        slots += pairs[j].slots.size();
    }
    EXPECT_EQ(alice.size(), 3u);
    EXPECT_EQ(bob.size(), 7u);
    EXPECT_EQ(slots, 8u);
    // (a2, b6) fills one slot in each plane's zero group
    ASSERT_EQ(pairs[3].slots.size(), 2u);
    EXPECT_EQ(pairs[3].slots[0].group, Group::zero_1);
    EXPECT_EQ(pairs[3].slots[1].group, Group::zero_2);
}

TEST(CanonicalLayout, ZeroAngleDegenerates)
{
    const auto L = canonical_layout(2, 0.0);
    for (Group g : kAllGroups)
        for (const auto& p : L.group(g)) EXPECT_TRUE(approx_equal(p.a, p.b, 0.0));
}

TEST(CanonicalLayout, OrderThreeSpacing)
{
    const auto L = canonical_layout(3, 0.3);
    EXPECT_EQ(L.slot_count(), 12u);
    const auto& g = L.group(Group::phi_1);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_NEAR(g[0].xi, 0.0, 1e-15);
    EXPECT_NEAR(g[1].xi, std::numbers::pi / 3, 1e-15);
    EXPECT_NEAR(g[2].xi, 2 * std::numbers::pi / 3, 1e-15);
    // odd N: the planes share no measured pair
    EXPECT_EQ(distinct_pairs(L).size(), 12u);
}

TEST(CanonicalLayout, RejectsBadArguments)
{
    EXPECT_THROW(canonical_layout(1, 0.1), DomainError);
    EXPECT_THROW(canonical_layout(2, -0.1), DomainError);
    EXPECT_THROW(canonical_layout(2, 3.2), DomainError);
}

TEST(CanonicalLayout, PairAnglesAndPlanesHoldForManyOrders)
{
    for (int N = 2; N <= 9; ++N)
        for (double phi : {0.0, 0.1, 0.7, 1.9, std::numbers::pi}) {
            const auto L = canonical_layout(N, phi);
            EXPECT_NO_THROW(L.validate());
            EXPECT_EQ(dot(L.plane1.normal(), L.plane2.normal()), 0.0);
            for (Group g : kAllGroups) {
                const double want = is_phi_group(g) ? phi : 0.0;
                for (const auto& p : L.group(g)) {
                    EXPECT_NEAR(angle_between(p.a, p.b), want, 1e-7); // acos loses precision at 0
                    EXPECT_NEAR(std::cos(want), dot(p.a, p.b), 1e-12);
                }
            }
        }
}

TEST(MeasurementLayout, ValidateCatchesBrokenInvariants)
{
    auto L = canonical_layout(2, 0.4);
    L.group(Group::phi_1)[1].xi += 0.01;
    EXPECT_THROW(L.validate(), DomainError);

    auto M = canonical_layout(2, 0.4);
    M.plane2 = PlaneFrame::xy();
    EXPECT_THROW(M.validate(), DomainError);

    auto K = canonical_layout(2, 0.4);
    K.group(Group::zero_2).pop_back();
    EXPECT_THROW(K.validate(), DomainError);
}
