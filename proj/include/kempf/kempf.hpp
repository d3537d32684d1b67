#pragma once

#include "kempf/balance.hpp"
#include "kempf/commands.hpp"
#include "kempf/core.hpp"
#include "kempf/errors.hpp"
#include "kempf/explore.hpp"
#include "kempf/io.hpp"
#include "kempf/lebrun.hpp"
#include "kempf/model.hpp"
#include "kempf/projective.hpp"
#include "kempf/version.hpp"
