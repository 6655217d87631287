// Copyright 2026 The rcsf Authors. All Rights Reserved.
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

#include "rcsf/audio_io.hpp"
#include "rcsf/dsp.hpp"
#include "rcsf/error.hpp"
#include "rcsf/eval.hpp"
#include "rcsf/feature_file.hpp"
#include "rcsf/features.hpp"
#include "rcsf/manifest.hpp"
#include "rcsf/matrix.hpp"
#include "rcsf/model_io.hpp"
#include "rcsf/pipeline.hpp"
#include "rcsf/svm.hpp"
#include "rcsf/synth.hpp"
