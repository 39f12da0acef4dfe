#include "expansion_impl.hpp"
#include "laurent_impl.hpp"
#include "oracle_impl.hpp"
#include "potential_impl.hpp"
#include "threshold_impl.hpp"

namespace dtl {
using S = double;
}

DTL_INSTANTIATE_POTENTIAL(dtl::S)
DTL_INSTANTIATE_LAURENT(dtl::S)
DTL_INSTANTIATE_THRESHOLD(dtl::S)
DTL_INSTANTIATE_EXPANSION(dtl::S)
DTL_INSTANTIATE_ORACLE(dtl::S)
DTL_INSTANTIATE_ORACLE_FLOAT(dtl::S)
