#pragma once

#include "sst/assignment.hpp"
#include "sst/composition.hpp"
#include "sst/copy_elimination.hpp"
#include "sst/error.hpp"
#include "sst/flow.hpp"
#include "sst/machine.hpp"
#include "sst/semantics.hpp"
#include "sst/text_format.hpp"
#include "sst/verification.hpp"
#include "sst/word.hpp"
