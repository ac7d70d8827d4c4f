#pragma once

#include <cassert>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dcs {

/// H(x) = 1 for x >= 0, else 0.
template <typename Scalar>
constexpr int heaviside(Scalar x)
{
    return x >= Scalar(0) ? 1 : 0;
}

/// Triangular membership function with feet a, c and peak b (a <= b <= c).
struct TriangularMembership {
    double a = 0.0;
    double b = 1.0;
    double c = 1.0;

    bool is_dont_change() const { return a == 0.0 && b == 1.0 && c == 1.0; }
    friend bool operator==(const TriangularMembership&, const TriangularMembership&) = default;
};

/// Maps p in [0,1] through the membership function.
///
/// Left shoulder (a = b = 0): (c - p) / c on [0, c], 0 above.
/// Right shoulder (b = c = 1): (p - a) / (1 - a) on [a, 1], 0 below.
/// Otherwise the usual triangle with right-closed segments
/// (a, b] rising and (b, c] falling.
template <typename Scalar>
Scalar eval_membership(const TriangularMembership& f, Scalar p)
{
    assert(p >= Scalar(0) && p <= Scalar(1));
    const Scalar a(f.a), b(f.b), c(f.c);
    if (f.a == 0.0 && f.b == 0.0) return p <= c ? (c - p) / c : Scalar(0);
    if (f.b == 1.0 && f.c == 1.0) return p >= a ? (p - a) / (Scalar(1) - a) : Scalar(0);
    if (p <= a) return Scalar(0);
    if (p <= b) return (p - a) / (b - a);
    if (p <= c) return (c - p) / (c - b);
    return Scalar(0);
}

/// Weight correction for catalog index k (1-based, D_F < k <= D_F + D_W):
/// scales p by (k - D_F) / D_W. Throws ValidationError for k outside the
/// weight range.
double eval_weight(int k, int num_memberships, int num_weights, double p);

enum class FunctionKind { Membership, Weight };

std::string to_string(FunctionKind kind);

/// Which part of the catalog the annealer may choose from.
///   Dcs:   everything.
///   Dnip:  weights plus Don't Change (class-level correction only).
///   Furud: memberships only (sample-level correction only).
enum class CorrectionMode { Dcs, Dnip, Furud };

std::string to_string(CorrectionMode mode);
CorrectionMode mode_from_string(const std::string& name);

/// Ordered catalog: indices 1..D_F are memberships, D_F+1..D_F+D_W weights.
class FunctionSet {
public:
    /// Validates 0 <= a <= b <= c <= 1, rejects a = b = c, requires the
    /// Don't Change membership (0,1,1) and at least one weight.
    FunctionSet(std::vector<TriangularMembership> memberships, int num_weights);

    int num_memberships() const { return static_cast<int>(memberships_.size()); }
    int num_weights() const { return num_weights_; }
    /// D_F + D_W, the number of choices per class.
    int size() const { return num_memberships() + num_weights_; }
    /// 1-based index of the first (0,1,1) membership.
    int dont_change_index() const { return dont_change_; }

    const std::vector<TriangularMembership>& memberships() const { return memberships_; }
    const TriangularMembership& membership(int k) const;

    bool contains(int k) const { return k >= 1 && k <= size(); }
    FunctionKind kind(int k) const;

    /// Correction value for catalog index k, gated as
    /// mu_k(p) * H(D_F - k) + omega_k(p) * H(k - D_F - 1).
    template <typename Scalar>
    Scalar apply(int k, Scalar p) const
    {
        assert(contains(k));
        const int df = num_memberships();
        Scalar out(0);
        if (heaviside(df - k)) out += eval_membership(memberships_[k - 1], p);
        if (heaviside(k - df - 1)) out += Scalar(k - df) / Scalar(num_weights_) * p;
        return out;
    }

    /// Human-readable parameters of index k, e.g. "a=0 b=1 c=1" or "w=0.5".
    std::string describe(int k) const;

    /// Catalog indices selectable under the given mode, ascending.
    std::vector<int> domain(CorrectionMode mode) const;

    friend bool operator==(const FunctionSet&, const FunctionSet&) = default;

private:
    std::vector<TriangularMembership> memberships_;
    int num_weights_;
    int dont_change_;
};

/// 19 memberships (Don't Change, nine interior triangles, five left and four
/// right shoulders) followed by 30 weights 1/30 .. 30/30.
FunctionSet default_function_set();

/// Catalog file: {"memberships": [{"a":..,"b":..,"c":..}, ...], "num_weights": int}.
std::string function_set_to_json(const FunctionSet& fs);
FunctionSet function_set_from_json(const std::string& text);

/// One catalog index per class.
class SelectionVector {
public:
    SelectionVector() = default;
    explicit SelectionVector(std::vector<int> indices) : xi_(std::move(indices)) {}

    int num_classes() const { return static_cast<int>(xi_.size()); }
    int operator[](int cls) const { return xi_[cls]; }
    int& operator[](int cls) { return xi_[cls]; }
    const std::vector<int>& values() const { return xi_; }

    /// True when every entry resolves in the catalog.
    bool valid_for(const FunctionSet& fs) const;

    friend bool operator==(const SelectionVector&, const SelectionVector&) = default;
    friend auto operator<=>(const SelectionVector&, const SelectionVector&) = default;

private:
    std::vector<int> xi_;
};

/// Throws ValidationError unless xi has N entries that all resolve in fs.
void check_selection(const FunctionSet& fs, const SelectionVector& xi, int num_classes);

/// Corrected copy of a probability row: p'_i = f_{xi_i}(p_i).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic>
apply_selection(const FunctionSet& fs, const SelectionVector& xi, const Eigen::MatrixBase<Derived>& row)
{
    using Scalar = typename Derived::Scalar;
    assert(row.size() == xi.num_classes());
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> out(row.size());
    for (Eigen::Index i = 0; i < row.size(); ++i) out(i) = fs.apply(xi[static_cast<int>(i)], row(i));
    return out;
}

} // namespace dcs
