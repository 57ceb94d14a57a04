#pragma once

#include "ktop/common.hpp"

namespace ktop {

// One kicked top: spin quantum number j (integer), kick strength k and a
// parity-breaking phase alpha entering the torsion as (Jz + alpha)^2.
struct TopParams {
    int j = 1;
    double k = 0.0;
    double alpha = 0.0;

    int dim() const { return 2 * j + 1; }
    void validate() const {
        if (j < 1) throw std::invalid_argument("TopParams: integer j >= 1 required");
    }
};

// Angular momentum matrices in the |j,m> basis ordered m = j, j-1, ..., -j.
CMatrix jz(int j);
CMatrix jplus(int j);
CMatrix jminus(int j);
CMatrix jy(int j);
CMatrix jx(int j);

// Floquet operator of a single kicked top,
//   U = exp(-i k/(2j) (Jz + alpha)^2) exp(-i pi/2 Jy),
// i.e. free rotation first, then the torsion kick.  The kick factor is
// diagonal; the rotation comes from diagonalizing the Hermitian Jy.
CMatrix top_floquet(const TopParams& p);

/// Diagonal of the kick factor: phases -k (m+alpha)^2 / (2j), m = j..-j.
CVector top_kick_diagonal(const TopParams& p);

} // namespace ktop
