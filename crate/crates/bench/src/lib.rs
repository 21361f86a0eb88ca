// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Fixtures shared by the benchmarks.

use pdakit::{theorem3_pda, Pda, SubsetGraphParams};

/// Subset-graph PDAs of increasing size, labelled by their parameters.
pub fn fixtures() -> Vec<(String, SubsetGraphParams, Pda)> {
    [(6, 2, 3, 1), (8, 2, 4, 1), (10, 2, 5, 1), (10, 3, 4, 1)]
        .into_iter()
        .map(|(m, a, b, l)| {
            let params = SubsetGraphParams::new(m, a, b, l).expect("fixture parameters are valid");
            let pda = theorem3_pda(params).expect("fixtures are small");
            (format!("m{m}_a{a}_b{b}_l{l}"), params, pda)
        })
        .collect()
}
