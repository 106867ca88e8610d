#pragma once

#include "ast/appearance.hpp"
#include "ast/bag.hpp"
#include "ast/error.hpp"
#include "ast/eval.hpp"
#include "ast/grassmann.hpp"
#include "ast/io.hpp"
#include "ast/motion.hpp"
#include "ast/numerics.hpp"
#include "ast/synth.hpp"
#include "ast/tracker.hpp"
