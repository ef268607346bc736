#pragma once

// Umbrella header for the full toolkit.

#include "lmplint/analyze.hpp"
#include "lmplint/ast.hpp"
#include "lmplint/expression.hpp"
#include "lmplint/normalize.hpp"
#include "lmplint/numeric.hpp"
#include "lmplint/parse.hpp"
#include "lmplint/pipeline.hpp"
#include "lmplint/report.hpp"
#include "lmplint/result.hpp"
#include "lmplint/rubric.hpp"
#include "lmplint/runner.hpp"
#include "lmplint/script.hpp"
#include "lmplint/signature.hpp"
#include "lmplint/text.hpp"
#include "lmplint/transform.hpp"
