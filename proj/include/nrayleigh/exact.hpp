#pragma once
// Exact level crossing rate / average fade duration of the product of N
// Rayleigh envelopes by direct numerical evaluation of the (N-1)-fold
// rate integral, plus the dual-hop single-integral fast path.

#include "nrayleigh/core.hpp"
#include "nrayleigh/specialfn.hpp"

namespace nray {

/// How the integration grid is laid out.  Both choices integrate in
/// log-substituted coordinates (x_i = sqrt(Omega_i) * e^{u_i}), where the
/// integrand decays doubly exponentially in every direction.
/// CriticalPointCentered (default) centers the tensor grid on the
/// transformed interior critical point; LogSubstitution centers it on the
/// substitution origin and widens it until the critical region is
/// covered.  The two must agree to tolerance - tests exploit that.
enum class MappingTag { LogSubstitution, CriticalPointCentered };

/// Error control for the exact integrals.
struct QuadratureSpec {
    double rel_tol = 1e-7;  ///< in (0, 1e-3]
    int node_budget = 128;  ///< max nodes per dimension, >= 16
    MappingTag mapping = MappingTag::CriticalPointCentered;

    void validate() const;
};

/// Exact crossing rate for 2 <= N <= 4 hops (N = 4 is supported but
/// costs a dense 3-D grid; a one-time note is written to stderr).
/// Successive grid-refinement passes must agree to q.rel_tol, otherwise
/// ConvergenceError; static cascades and unsupported N raise errors.
double exact_lcr(const CascadeSpec& cascade, double y, const QuadratureSpec& q = {});

/// Dual-hop (N = 2) crossing rate by 1-D adaptive quadrature of the
/// single-integral form.  Same tolerance contract.
double exact_lcr_dualhop(const CascadeSpec& cascade, double y, const QuadratureSpec& q = {});

/// Average fade duration: CDF / exact_lcr, making the afd * lcr = cdf
/// identity exact by construction.
double exact_afd(const CascadeSpec& cascade, double y, const QuadratureSpec& q = {},
                 const CdfEvalOptions& cdf_opts = {});

}  // namespace nray
