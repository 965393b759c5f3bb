// Copyright 2026 The pcefold Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pcefold/ansatz.hpp"
#include "pcefold/decode.hpp"
#include "pcefold/encoding.hpp"
#include "pcefold/energy_table.hpp"
#include "pcefold/error.hpp"
#include "pcefold/metrics.hpp"
#include "pcefold/optimize.hpp"
#include "pcefold/oracle.hpp"
#include "pcefold/qubo_io.hpp"
#include "pcefold/rna_qubo.hpp"
#include "pcefold/statevector.hpp"
#include "pcefold/train.hpp"
#include "pcefold/harness.hpp"
