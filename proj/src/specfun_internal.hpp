#pragma once

namespace tubelab::specfun::detail {

long double ln_gamma_ld(long double x);

}  // namespace tubelab::specfun::detail
