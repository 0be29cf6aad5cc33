#pragma once

#include "boxed_pp/numerics.hpp"
#include "boxed_pp/weights.hpp"
#include "boxed_pp/oracle.hpp"
#include "boxed_pp/chains.hpp"
#include "boxed_pp/sampler.hpp"
#include "boxed_pp/kernel.hpp"
#include "boxed_pp/asymptotics.hpp"
#include "boxed_pp/elliptic.hpp"
#include "boxed_pp/verify.hpp"
#include "boxed_pp/cli.hpp"
