/*
 * Copyright (c) 2026, The kgshard Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "kgshard/clustering.hpp"
#include "kgshard/commands.hpp"
#include "kgshard/config.hpp"
#include "kgshard/errors.hpp"
#include "kgshard/feature.hpp"
#include "kgshard/federation_sim.hpp"
#include "kgshard/kg_model.hpp"
#include "kgshard/lubm_generator.hpp"
#include "kgshard/partition.hpp"
#include "kgshard/partitioner.hpp"
#include "kgshard/pattern.hpp"
#include "kgshard/query_analyzer.hpp"
#include "kgshard/term.hpp"
#include "kgshard/workload.hpp"
