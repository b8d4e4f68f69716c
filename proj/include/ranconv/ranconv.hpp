// Convenience umbrella: the whole library in one include.
#pragma once

#include "ranconv/atom_space.hpp"
#include "ranconv/convex_fn.hpp"
#include "ranconv/errors.hpp"
#include "ranconv/json_io.hpp"
#include "ranconv/l0_scalar.hpp"
#include "ranconv/lp.hpp"
#include "ranconv/order_ops.hpp"
#include "ranconv/rn_module.hpp"
#include "ranconv/rng.hpp"
