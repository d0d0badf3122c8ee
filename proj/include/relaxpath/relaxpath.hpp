#pragma once

#include "relaxpath/errors.hpp"
#include "relaxpath/tolerances.hpp"
#include "relaxpath/core.hpp"
#include "relaxpath/lines.hpp"
#include "relaxpath/path.hpp"
#include "relaxpath/sweepline.hpp"
#include "relaxpath/selection.hpp"
#include "relaxpath/sqpath.hpp"
#include "relaxpath/cascade.hpp"
