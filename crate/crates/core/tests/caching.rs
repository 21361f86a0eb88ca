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

//! End-to-end delivery over every small subset-graph PDA.

use pdakit::caching::xor_all;
use pdakit::{
    decode, deliver, maddah_niesen_pda, place, simulate, theorem3_pda, verify_pda, DemandVector,
    Library, Pda, Ratio, SimulationConfig, SubsetGraphParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PACKET_LEN: usize = 32;

fn corpus() -> Vec<(String, Pda)> {
    let mut out: Vec<(String, Pda)> = SubsetGraphParams::all_up_to(7)
        .into_iter()
        .map(|p| (p.to_string(), theorem3_pda(p).unwrap()))
        .collect();
    for k in 1..=5 {
        for t in 0..=k {
            out.push((
                format!("MN(K={k}, t={t})"),
                maddah_niesen_pda(k, t).unwrap(),
            ));
        }
    }
    out
}

#[test]
fn every_user_recovers_its_file() {
    for (name, pda) in corpus() {
        let report = verify_pda(&pda);
        for round in 0..20u64 {
            let num_files = 1 + (round as usize % 5);
            let config = SimulationConfig {
                num_files,
                packet_len: PACKET_LEN,
                demands: None,
                seed: round,
            };
            let result = simulate(&pda, &config).unwrap();
            assert!(
                result.all_decoded(),
                "{name}, seed {round}: {:?}",
                result.decoded
            );
            assert_eq!(result.signals_sent(), report.s as usize);
            assert_eq!(result.link_bytes, report.s as usize * PACKET_LEN, "{name}");
            assert_eq!(
                result.measured_rate,
                Ratio::new(report.s as u128, report.f as u128)
            );
        }
    }
}

#[test]
fn signals_cancel_down_to_any_single_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (name, pda) in corpus().into_iter().step_by(3) {
        let lib = Library::random(3, PACKET_LEN * pda.rows(), &mut rng).unwrap();
        let d = DemandVector::random(pda.cols(), 3, &mut rng);
        for signal in deliver(&pda, &lib, &d).unwrap() {
            let packets: Vec<&[u8]> = signal
                .terms
                .iter()
                .map(|t| lib.packet(d.file_of(t.user), t.packet, PACKET_LEN))
                .collect();
            for skip in 0..packets.len() {
                let mut rest: Vec<&[u8]> = packets.clone();
                let target = rest.remove(skip);
                rest.push(&signal.payload);
                assert_eq!(xor_all(&rest), target, "{name}, color {}", signal.color);
            }
        }
    }
}

#[test]
fn cache_budget_matches_memory_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, pda) in corpus() {
        let report = verify_pda(&pda);
        let n = 2;
        let lib = Library::random(n, PACKET_LEN * pda.rows(), &mut rng).unwrap();
        for cache in place(&pda, &lib).unwrap() {
            assert_eq!(cache.len(), n * report.z, "{name}");
            // Z/F of the library, in bytes.
            assert_eq!(
                cache.bytes() * report.f,
                report.z * n * lib.file_len(),
                "{name}"
            );
        }
    }
}

#[test]
fn decoding_is_independent_of_other_users_caches() {
    let pda = theorem3_pda(SubsetGraphParams::new(6, 2, 3, 1).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lib = Library::random(20, 20 * PACKET_LEN, &mut rng).unwrap();
    let d = DemandVector::random(pda.cols(), 20, &mut rng);
    let caches = place(&pda, &lib).unwrap();
    let signals = deliver(&pda, &lib, &d).unwrap();
    for (k, cache) in caches.iter().enumerate() {
        assert_eq!(
            decode(&pda, cache, &signals, &d, k).unwrap(),
            lib.file(d.file_of(k))
        );
    }
}
