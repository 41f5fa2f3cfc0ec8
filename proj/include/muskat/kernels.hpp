#pragma once

#include <optional>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

/// Which singular integral operator a KernelSpec describes.
enum class KernelKind { generic_bnm, A_of_f, B_of_f, A_star_of_f };

/// How the node x_l = x_j is treated in the principal value sum.
enum class DiagonalRule {
    omit,    ///< symmetric omission only
    taylor,  ///< omission plus the next-order Taylor term of the kernel
};

/// How offsets x_j - x_l are formed.
enum class Window {
    line,      ///< y = x_j - x_l over the whole grid; samples outside the window count as zero
    periodic,  ///< offsets wrapped into (-L, L); the unpaired offset L is dropped
};

/// Operator description.
///
/// For generic_bnm the operator is
///   B_{n,m}(a)[b, w](x) = PV int w(x-y)/y * prod_i (d b_i / y) / prod_k (1 + (d a_k / y)^2) dy
/// with d u = u(x) - u(x-y), n = b_list.size(), m = a_list.size().
/// The A, B, A* kinds carry their interface f as the single entry of a_list.
struct KernelSpec {
    KernelKind kind = KernelKind::generic_bnm;
    std::vector<GridFunction> a_list;
    std::vector<GridFunction> b_list;
    Window window = Window::line;
    /// Optional exact f' and f'' for the A, B, A* kinds (spectral otherwise).
    std::optional<GridFunction> fp;
    std::optional<GridFunction> fpp;

    static KernelSpec bnm(std::vector<GridFunction> a, std::vector<GridFunction> b);
    static KernelSpec A(const GridFunction& f);
    static KernelSpec B(const GridFunction& f);
    static KernelSpec A_star(const GridFunction& f);

    const Grid& grid() const;
    /// Throws on an empty a_list for generic_bnm, a wrong arity for the
    /// named kinds, or mixed grids.
    void validate() const;
};

struct OperatorMatrix {
    Grid grid;
    Matrix entries;
    KernelSpec spec;

    GridFunction apply(const GridFunction& omega) const;
};

GridFunction bnm_apply(const KernelSpec& spec, const GridFunction& omega,
                       DiagonalRule rule = DiagonalRule::taylor);

/// Shorthand for bnm_apply(KernelSpec::bnm(a, b), omega).
GridFunction bnm(const std::vector<GridFunction>& a, const std::vector<GridFunction>& b,
                 const GridFunction& omega, DiagonalRule rule = DiagonalRule::taylor);

/// Adjoint double layer potential A(f)[w].
GridFunction apply_A(const GridFunction& f, const GridFunction& omega);

/// B(f)[w] = B_{0,1}(f)[w] + f' B_{1,1}(f)[f, w], evaluated with the
/// Hilbert transform split off and applied spectrally.
GridFunction apply_B(const GridFunction& f, const GridFunction& omega);

/// Double layer potential, the L2 adjoint of apply_A.
GridFunction apply_A_star(const GridFunction& f, const GridFunction& phi);

/// Dispatches on spec.kind.
GridFunction apply(const KernelSpec& spec, const GridFunction& omega,
                   DiagonalRule rule = DiagonalRule::taylor);

/// Dense matrix using exactly the quadrature rule of `apply`.
OperatorMatrix assemble_matrix(const KernelSpec& spec, DiagonalRule rule = DiagonalRule::taylor);

/// Correction term in the derivative of A(f)[w]:
///   (A(f)[w])' = A(f)[w'] + T(f)[w].
GridFunction derivative_remainder_A(const GridFunction& f, const GridFunction& omega);

/// Same for B(f): (B(f)[w])' = B(f)[w'] + T_B(f)[w].
GridFunction derivative_remainder_B(const GridFunction& f, const GridFunction& omega);

}  // namespace muskat
