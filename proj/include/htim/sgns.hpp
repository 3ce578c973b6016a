/*
 * Copyright 2026 The HTIM Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>
#include <vector>

#include "htim/alias.hpp"
#include "htim/common.hpp"

namespace htim {

// Shared negative-sampling objective used by CBOW, skip-gram on walks and
// relational pair embeddings:
//   L(h) = -log s(h.v_pos) - sum_n log s(-h.v_n)
// where h is an input-side vector and v_* are output-table rows.

double sigmoid(double x);

// Loss only; reads parameters, never writes.
double sgns_loss(std::span<const double> h, const Matrix& out, std::size_t positive,
                 std::span<const std::size_t> negatives);

// One SGD step on the output rows. Accumulates dL/dh (evaluated at the
// pre-update output rows) into grad_h and returns the loss before the step.
double sgns_update_outputs(std::span<const double> h, Matrix& out, std::size_t positive,
                           std::span<const std::size_t> negatives, double lr, std::span<double> grad_h);

// Noise distribution proportional to count^0.75.
AliasTable unigram_noise(std::span<const double> counts, double power = 0.75);

// Draws `k` negatives that differ from `positive` (skips collisions like the
// reference word2vec sampler, so fewer than k may be returned).
void draw_negatives(const AliasTable& noise, Rng& rng, std::size_t positive, int k,
                    std::vector<std::size_t>& out);

// Linear learning-rate decay between lr_start and lr_end over progress in [0,1].
inline double decayed_lr(double lr_start, double lr_end, double progress) {
    if (progress > 1.0) progress = 1.0;
    return lr_start - (lr_start - lr_end) * progress;
}

// Small uniform initialization, word2vec style: U(-0.5/d, 0.5/d).
void init_uniform(Matrix& m, Rng& rng);

// Mean loss per tenth of training, used for convergence diagnostics.
struct LossTrace {
    std::vector<double> segment_mean;
    std::vector<double> epoch_mean;
};

}  // namespace htim
