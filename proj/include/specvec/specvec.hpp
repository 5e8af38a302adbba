#pragma once

#include "specvec/generate.hpp"
#include "specvec/identity.hpp"
#include "specvec/matrix_core.hpp"
#include "specvec/parallel.hpp"
#include "specvec/signed_log.hpp"
#include "specvec/spectral.hpp"
#include "specvec/verify.hpp"
