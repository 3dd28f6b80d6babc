#pragma once

#include "amplification.hpp"
#include "config.hpp"
#include "cycles.hpp"
#include "errors.hpp"
#include "expansion.hpp"
#include "extraction.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "separator.hpp"
#include "walk.hpp"
