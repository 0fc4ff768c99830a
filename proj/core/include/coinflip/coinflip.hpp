#pragma once

// Umbrella header: the whole coin-flipping library.

#include <coinflip/arith.hpp>
#include <coinflip/errors.hpp>
#include <coinflip/types.hpp>
#include <coinflip/tree.hpp>
#include <coinflip/bounds.hpp>
#include <coinflip/analyze.hpp>
#include <coinflip/brute_force.hpp>
#include <coinflip/protocols.hpp>
#include <coinflip/simulate.hpp>
#include <coinflip/serialize.hpp>
