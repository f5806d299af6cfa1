// Generated by tools/oracle.py (mpmath, 40 digits); do not edit.
#![allow(clippy::excessive_precision)]

use sklyanin_core::C64;

pub const THETA: [(f64, C64, C64); 6] = [
    (0.25, C64::new(3.1e-1, 7.0e-2), C64::new(1.2764384232889315181, 4.4388502830309530918e-1)),
    (0.25, C64::new(-1.2e-1, 1.9e-1), C64::new(9.9070347217697769277e-2, 5.0219850120247320838e-1)),
    (0.25, C64::new(4.5e-1, -3.0e-2), C64::new(1.9587769262738684617, -7.3894273934613099687e-2)),
    (1.0, C64::new(3.1e-1, 7.0e-2), C64::new(7.7205029329854828524e-1, 1.148041212563027285e-1)),
    (1.0, C64::new(-1.2e-1, 1.9e-1), C64::new(-3.9253565389574525378e-1, 5.3455811210709160511e-1)),
    (1.0, C64::new(4.5e-1, -3.0e-2), C64::new(9.0623091444972661452e-1, -1.3685764198148944766e-2)),
];

pub const THETA_PRIME_ZERO: [(f64, f64); 2] = [
    (0.25, 2.1721684503254962347),
    (1.0, 2.8486946039877873161),
];

pub const BASIS: [(f64, C64, usize, usize, C64); 6] = [
    (0.25, C64::new(5.0e-2, 0.0), 2, 0, C64::new(-5.4936010550853984905e-1, 8.3715423637168284138e-1)),
    (0.25, C64::new(5.0e-2, 0.0), 3, 1, C64::new(1.0881822260483269896, -5.1476483076972487753e-1)),
    (0.25, C64::new(5.0e-2, 0.0), 3, 3, C64::new(1.0200245466609372652e-1, -4.5327326939894510335e-2)),
    (1.0, C64::new(0.0, 5.0e-2), 2, 0, C64::new(-9.8581988721929309253e-2, 2.6417278185871561814e-1)),
    (1.0, C64::new(0.0, 5.0e-2), 3, 1, C64::new(8.1230261235153871959e-2, -1.0634367097565531083e-1)),
    (1.0, C64::new(0.0, 5.0e-2), 3, 3, C64::new(-2.1305218228838154668e-1, 6.8512841067576226883e-2)),
];

pub const WEIGHT: [(f64, C64, usize, C64, C64); 4] = [
    (0.25, C64::new(5.0e-2, 0.0), 1, C64::new(2.1e-1, 7.0e-2), C64::new(5.3810926064412582871, 9.3014665366768914686e-40)),
    (0.25, C64::new(5.0e-2, 0.0), 3, C64::new(2.1e-1, 7.0e-2), C64::new(2.7529731276957207585, 8.3787662153958423689e-40)),
    (1.0, C64::new(0.0, 5.0e-2), 1, C64::new(8.4e-1, 2.8e-1), C64::new(4.6957921350998114267e-3, 9.2196007145720808755e-43)),
    (1.0, C64::new(0.0, 5.0e-2), 3, C64::new(8.4e-1, 2.8e-1), C64::new(2.6286669660408195754e-5, 1.3608608843682338319e-44)),
];

pub const CONST_C: [(f64, C64, usize, C64); 4] = [
    (0.25, C64::new(5.0e-2, 0.0), 1, C64::new(2.0568221906402480513e-1, 0.0)),
    (0.25, C64::new(5.0e-2, 0.0), 3, C64::new(7.477495448140907855e-2, 0.0)),
    (1.0, C64::new(0.0, 5.0e-2), 1, C64::new(1.5730488860901407403e-2, -8.9485527958708607305e-97)),
    (1.0, C64::new(0.0, 5.0e-2), 3, C64::new(6.6407055392895141098e-3, -2.3919817748088109005e-97)),
];

pub const GAMMA_K: [(f64, C64, usize, usize, C64); 6] = [
    (0.25, C64::new(5.0e-2, 0.0), 2, 1, C64::new(6.8622985189261620299e-2, 1.3092075316433895775e-1)),
    (0.25, C64::new(5.0e-2, 0.0), 3, 0, C64::new(2.549960516604203827e-3, -1.3756796070604607012e-2)),
    (0.25, C64::new(5.0e-2, 0.0), 3, 2, C64::new(-7.2745286829164980811e-2, 3.4294971877584116499e-3)),
    (1.0, C64::new(0.0, 5.0e-2), 2, 1, C64::new(5.774816579654150339e-3, 1.5757489895848261997e-3)),
    (1.0, C64::new(0.0, 5.0e-2), 3, 0, C64::new(9.7499378236226259421e-4, 1.1123702694244763023e-3)),
    (1.0, C64::new(0.0, 5.0e-2), 3, 2, C64::new(-3.2403868244173128012e-4, 4.2328289849980039225e-4)),
];

pub const ELL_GAMMA: [(f64, C64, C64, C64); 2] = [
    (0.2, C64::new(5.0e-1, 1.0e-1), C64::new(3.0e-1, 1.0e-1), C64::new(7.9530098995555274215e-1, 3.3799948761490442848e-1)),
    (0.05, C64::new(1.0e-1, -3.0e-1), C64::new(-7.0e-1, 4.0e-1), C64::new(5.51420854444843824e-1, 2.9154997838527128453e-1)),
];
