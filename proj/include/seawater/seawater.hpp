#pragma once

#include "commands.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "format.hpp"
#include "initial.hpp"
#include "mesh.hpp"
#include "params.hpp"
#include "profiles.hpp"
#include "scheme.hpp"
#include "state.hpp"
