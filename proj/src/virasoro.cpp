#include <gluecb/virasoro.hpp>

namespace gluecb {

template struct VermaVector<Rational>;
template struct VermaVector<Complex>;
template class ThreePoint<Rational>;
template class ThreePoint<Complex>;

template VermaVector<Rational> apply_L(int, const VermaVector<Rational>&,
                                       const VirasoroParams<Rational>&);
template VermaVector<Complex> apply_L(int, const VermaVector<Complex>&,
                                      const VirasoroParams<Complex>&);
template Matrix<Rational> gram_matrix(const VirasoroParams<Rational>&, int);
template Matrix<Complex> gram_matrix(const VirasoroParams<Complex>&, int);
template Matrix<Rational> dual_basis(const VirasoroParams<Rational>&, int);
template Matrix<Complex> dual_basis(const VirasoroParams<Complex>&, int);

}  // namespace gluecb
