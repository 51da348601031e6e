// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mcnc/analysis.hpp"
#include "mcnc/channel.hpp"
#include "mcnc/errors.hpp"
#include "mcnc/frontend.hpp"
#include "mcnc/modem.hpp"
#include "mcnc/numerics.hpp"
#include "mcnc/precoding.hpp"
#include "mcnc/receiver.hpp"
