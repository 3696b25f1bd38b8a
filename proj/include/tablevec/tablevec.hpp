// Copyright 2026 The tablevec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "tablevec/common.hpp"
#include "tablevec/corpus.hpp"
#include "tablevec/embedding.hpp"
#include "tablevec/eval.hpp"
#include "tablevec/kb.hpp"
#include "tablevec/pipeline.hpp"
#include "tablevec/population.hpp"
#include "tablevec/retrieval.hpp"
#include "tablevec/stopwords.hpp"
