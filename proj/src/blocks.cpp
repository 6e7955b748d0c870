#include <gluecb/blocks.hpp>

namespace gluecb {

template struct PantsDecomposition<Rational>;
template struct PantsDecomposition<Complex>;
template class BlockEvaluator<Rational>;
template class BlockEvaluator<Complex>;

template BlockSeries<Rational> graph_block(const PantsDecomposition<Rational>&, int,
                                           EdgeTruncation);
template BlockSeries<Complex> graph_block(const PantsDecomposition<Complex>&, int,
                                          EdgeTruncation);
template BlockSeries<Rational> glue_two(const PantsDecomposition<Rational>&, int,
                                        const PantsDecomposition<Rational>&, int,
                                        const Rational&, int);
template BlockSeries<Complex> glue_two(const PantsDecomposition<Complex>&, int,
                                       const PantsDecomposition<Complex>&, int,
                                       const Complex&, int);
template BlockSeries<Rational> self_glue(const PantsDecomposition<Rational>&, int, int,
                                         const Rational&, int);
template BlockSeries<Complex> self_glue(const PantsDecomposition<Complex>&, int, int,
                                        const Complex&, int);

}  // namespace gluecb
