// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dynprec/config.hpp"
#include "dynprec/gross_float.hpp"
#include "dynprec/normalize.hpp"
#include "dynprec/profiler.hpp"
#include "dynprec/trace.hpp"
#include "dynprec/arithmetic.hpp"
#include "dynprec/io.hpp"
#include "dynprec/precision_control.hpp"
#include "dynprec/rootfind.hpp"
