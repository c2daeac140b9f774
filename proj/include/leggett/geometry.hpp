#pragma once

// Poincare-sphere vectors, measurement planes and the grouped setting layouts
// that enter the generalized Leggett inequality.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leggett/errors.hpp"

namespace leggett {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// A point on the Poincare sphere. Norm is 1 within 1e-12 by construction.
class UnitVec3 {
public:
    static constexpr double kNormTolerance = 1e-12;

    /// Defaults to the x axis.
    constexpr UnitVec3() = default;

    /// Scales `v` onto the sphere; rejects the zero vector.
    static UnitVec3 normalized(const Vec3& v)
    {
        const double n = norm(v);
        if (!(n > 0.0) || !std::isfinite(n))
            throw DomainError("cannot normalize a zero or non-finite vector");
        return UnitVec3(v * (1.0 / n));
    }

    /// Takes the components as given; they must already have unit norm.
    static UnitVec3 from_components(double x, double y, double z)
    {
        const Vec3 v{x, y, z};
        if (!(std::abs(norm(v) - 1.0) <= kNormTolerance))
            throw DomainError("vector is not of unit norm");
        return UnitVec3(v);
    }

    /// Polar angle `theta` from +z, azimuth `azimuth` from +x.
    static UnitVec3 from_spherical(double theta, double azimuth)
    {
        const double st = std::sin(theta);
        return UnitVec3(Vec3{st * std::cos(azimuth), st * std::sin(azimuth), std::cos(theta)});
    }

    static constexpr UnitVec3 x_axis() { return UnitVec3(Vec3{1.0, 0.0, 0.0}); }
    static constexpr UnitVec3 y_axis() { return UnitVec3(Vec3{0.0, 1.0, 0.0}); }
    static constexpr UnitVec3 z_axis() { return UnitVec3(Vec3{0.0, 0.0, 1.0}); }

    constexpr double x() const { return v_.x; }
    constexpr double y() const { return v_.y; }
    constexpr double z() const { return v_.z; }
    constexpr const Vec3& vec() const { return v_; }
    constexpr operator const Vec3&() const { return v_; }

    constexpr UnitVec3 operator-() const { return UnitVec3(-v_); }

    /// Polar angle in [0, pi].
    double theta() const { return std::acos(std::clamp(v_.z, -1.0, 1.0)); }
    /// Azimuth in (-pi, pi].
    double azimuth() const { return std::atan2(v_.y, v_.x); }

private:
    constexpr explicit UnitVec3(const Vec3& v) : v_(v) {}

    Vec3 v_{1.0, 0.0, 0.0};
};

inline bool approx_equal(const UnitVec3& a, const UnitVec3& b, double tol)
{
    return std::abs(a.x() - b.x()) <= tol && std::abs(a.y() - b.y()) <= tol &&
           std::abs(a.z() - b.z()) <= tol;
}

/// Angle in [0, pi] between two sphere points.
inline double angle_between(const UnitVec3& a, const UnitVec3& b)
{
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

/// Right-handed orthonormal basis of a measurement plane.
class PlaneFrame {
public:
    static constexpr double kTolerance = 1e-12;

    PlaneFrame(const UnitVec3& e1, const UnitVec3& e2) : e1_(e1), e2_(e2)
    {
        if (!(std::abs(dot(e1, e2)) <= kTolerance))
            throw DomainError("plane basis vectors are not orthogonal");
        normal_ = UnitVec3::normalized(cross(e1, e2));
    }

    static PlaneFrame xy() { return {UnitVec3::x_axis(), UnitVec3::y_axis()}; }
    static PlaneFrame yz() { return {UnitVec3::y_axis(), UnitVec3::z_axis()}; }
    static PlaneFrame zx() { return {UnitVec3::z_axis(), UnitVec3::x_axis()}; }

    const UnitVec3& e1() const { return e1_; }
    const UnitVec3& e2() const { return e2_; }
    const UnitVec3& normal() const { return normal_; }

    /// In-plane angle of `v` measured from e1 towards e2.
    double angle_of(const Vec3& v) const { return std::atan2(dot(v, e2_), dot(v, e1_)); }

    bool contains(const Vec3& v, double tol) const { return std::abs(dot(v, normal_)) <= tol; }

private:
    UnitVec3 e1_;
    UnitVec3 e2_;
    UnitVec3 normal_;
};

/// cos(angle) e1 + sin(angle) e2.
inline UnitVec3 rotate_in_plane(const PlaneFrame& frame, double angle)
{
    const Vec3 v = std::cos(angle) * frame.e1().vec() + std::sin(angle) * frame.e2().vec();
    return UnitVec3::normalized(v);
}

/// One correlation measurement: Alice along `a`, Bob along `b`, both in `plane`.
/// `xi` is the in-plane angle of `a` (not of the a/b bisector).
struct SettingPair {
    UnitVec3 a;
    UnitVec3 b;
    double phi = 0.0;
    double xi = 0.0;
    PlaneFrame plane = PlaneFrame::xy();

    double xi_b() const { return plane.angle_of(b); }
};

enum class Group { phi_1 = 0, zero_1 = 1, phi_2 = 2, zero_2 = 3 };

inline constexpr std::array<Group, 4> kAllGroups{Group::phi_1, Group::zero_1, Group::phi_2,
                                                 Group::zero_2};

constexpr std::string_view group_name(Group g)
{
    switch (g) {
    case Group::phi_1: return "phi_1";
    case Group::zero_1: return "zero_1";
    case Group::phi_2: return "phi_2";
    case Group::zero_2: return "zero_2";
    }
    return "?";
}

inline std::optional<Group> group_from_name(std::string_view name)
{
    for (Group g : kAllGroups)
        if (group_name(g) == name) return g;
    return std::nullopt;
}

/// 0 for the first modulus (plane 1), 1 for the second (plane 2).
constexpr int modulus_of(Group g) { return (g == Group::phi_1 || g == Group::zero_1) ? 0 : 1; }

constexpr bool is_phi_group(Group g) { return g == Group::phi_1 || g == Group::phi_2; }

/// The 4 x N setting pairs of the order-N inequality: two orthogonal planes, and
/// in each plane one group at relative angle phi and one at relative angle 0.
struct MeasurementLayout {
    static constexpr double kTolerance = 1e-10;

    int N = 2;
    double phi = 0.0;
    PlaneFrame plane1 = PlaneFrame::xy();
    PlaneFrame plane2 = PlaneFrame::yz();
    std::array<std::vector<SettingPair>, 4> groups;

    const std::vector<SettingPair>& group(Group g) const { return groups[static_cast<int>(g)]; }
    std::vector<SettingPair>& group(Group g) { return groups[static_cast<int>(g)]; }
    const PlaneFrame& plane_of(Group g) const { return modulus_of(g) == 0 ? plane1 : plane2; }
    std::size_t slot_count() const { return 4 * static_cast<std::size_t>(N); }

    /// Throws DomainError describing the first broken invariant.
    void validate() const
    {
        if (N < 2) throw DomainError("layout order N must be at least 2");
        if (!(phi >= 0.0 && phi <= std::numbers::pi)) throw DomainError("layout phi outside [0, pi]");
        if (!(std::abs(dot(plane1.normal(), plane2.normal())) <= kTolerance))
            throw DomainError("layout planes are not orthogonal");
        const double step = std::numbers::pi / N;
        for (Group g : kAllGroups) {
            const auto& pairs = group(g);
            const std::string name(group_name(g));
            if (pairs.size() != static_cast<std::size_t>(N))
                throw DomainError("group " + name + " does not hold N pairs");
            const double expected_angle = is_phi_group(g) ? phi : 0.0;
            const PlaneFrame& frame = plane_of(g);
            for (std::size_t n = 0; n < pairs.size(); ++n) {
                const SettingPair& p = pairs[n];
                if (!(std::abs(std::cos(p.phi) - dot(p.a, p.b)) <= kTolerance) ||
                    !(std::abs(p.phi - expected_angle) <= kTolerance))
                    throw DomainError("group " + name + " pair " + std::to_string(n) +
                                      " has the wrong relative angle");
                if (!approx_equal(p.a, rotate_in_plane(frame, p.xi), kTolerance) ||
                    !frame.contains(p.b, kTolerance))
                    throw DomainError("group " + name + " pair " + std::to_string(n) +
                                      " does not lie in its plane");
                if (n > 0 && !(std::abs(p.xi - pairs[n - 1].xi - step) <= kTolerance))
                    throw DomainError("group " + name + " xi spacing is not pi/N");
            }
        }
    }
};

/// Alice at xi_n = n pi / N in each plane; Bob at xi_n + phi (plane 1) or
/// xi_n - phi (plane 2) for the phi groups, and at xi_n for the zero groups.
/// The plane-2 sign reproduces b3 = (0, cos, -sin), b4 = (0, sin, cos) for N = 2.
inline MeasurementLayout canonical_layout(int N, double phi)
{
    if (N < 2) throw DomainError("N must be at least 2");
    if (!(phi >= 0.0 && phi <= std::numbers::pi)) throw DomainError("phi must lie in [0, pi]");

    MeasurementLayout layout;
    layout.N = N;
    layout.phi = phi;
    const double step = std::numbers::pi / N;
    for (Group g : kAllGroups) {
        const PlaneFrame& frame = layout.plane_of(g);
        const double offset = is_phi_group(g) ? (modulus_of(g) == 0 ? phi : -phi) : 0.0;
        auto& pairs = layout.group(g);
        pairs.reserve(N);
        for (int n = 0; n < N; ++n) {
            const double xi = n * step;
            const UnitVec3 a = rotate_in_plane(frame, xi);
            const UnitVec3 b = offset == 0.0 ? a : rotate_in_plane(frame, xi + offset);
            pairs.push_back(SettingPair{a, b, is_phi_group(g) ? phi : 0.0, xi, frame});
        }
    }
    return layout;
}

struct SlotRef {
    Group group;
    std::size_t index;
};

/// A physically distinct setting pair together with every inequality slot it fills.
struct DistinctPair {
    SettingPair pair;
    std::vector<SlotRef> slots;
    int alice_index = 0; ///< 1-based label index among distinct Alice vectors
    int bob_index = 0;   ///< 1-based label index among distinct Bob vectors

    std::string label() const
    {
        if (alice_index < 10 && bob_index < 10)
            return "E" + std::to_string(alice_index) + std::to_string(bob_index);
        return "E" + std::to_string(alice_index) + "," + std::to_string(bob_index);
    }
};

namespace detail {

inline int index_of(std::vector<UnitVec3>& seen, const UnitVec3& v, double tol)
{
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (approx_equal(seen[i], v, tol)) return static_cast<int>(i) + 1;
    seen.push_back(v);
    return static_cast<int>(seen.size());
}

} // namespace detail

/// Deduplicates the 4N slots (serialization order: phi_1, zero_1, phi_2, zero_2)
/// into distinct measurements, ordered by first appearance. Alice vectors are
/// numbered by first appearance; Bob vectors number the phi-group partners first,
/// then the zero-group partners, which yields the E11, E22, E15, E26, E23, E34,
/// E37 labels for the canonical N = 2 layout.
inline std::vector<DistinctPair> distinct_pairs(const MeasurementLayout& layout,
                                                double tol = 1e-9)
{
    std::vector<UnitVec3> alices;
    std::vector<UnitVec3> bobs;
    for (Group g : {Group::phi_1, Group::phi_2})
        for (const SettingPair& p : layout.group(g)) detail::index_of(bobs, p.b, tol);

    std::vector<DistinctPair> out;
    for (Group g : kAllGroups) {
        const auto& pairs = layout.group(g);
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            const SettingPair& p = pairs[n];
            const int ai = detail::index_of(alices, p.a, tol);
            const int bi = detail::index_of(bobs, p.b, tol);
            auto it = std::find_if(out.begin(), out.end(), [&](const DistinctPair& d) {
                return approx_equal(d.pair.a, p.a, tol) && approx_equal(d.pair.b, p.b, tol);
            });
            if (it == out.end()) {
                out.push_back(DistinctPair{p, {}, ai, bi});
                it = std::prev(out.end());
            }
            it->slots.push_back(SlotRef{g, n});
        }
    }
    return out;
}

} // namespace leggett
