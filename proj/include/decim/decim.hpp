#pragma once

#include "bessel.hpp"
#include "complex_utils.hpp"
#include "errors.hpp"
#include "finite_chain.hpp"
#include "model.hpp"
#include "observables.hpp"
#include "oracle.hpp"
#include "semi_infinite.hpp"
#include "transient.hpp"
