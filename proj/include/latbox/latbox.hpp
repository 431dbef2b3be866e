#pragma once

#include "latbox/cli.hpp"
#include "latbox/errors.hpp"
#include "latbox/io.hpp"
#include "latbox/lattice.hpp"
#include "latbox/limit_laws.hpp"
#include "latbox/rng.hpp"
#include "latbox/sampling.hpp"
#include "latbox/verify.hpp"
