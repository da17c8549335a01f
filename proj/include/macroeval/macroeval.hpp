#pragma once

#include "macroeval/corpus.hpp"
#include "macroeval/error.hpp"
#include "macroeval/favoritism.hpp"
#include "macroeval/metrics.hpp"
#include "macroeval/rankstats.hpp"
#include "macroeval/tokenize.hpp"
#include "macroeval/typestats.hpp"
#include "macroeval/version.hpp"
