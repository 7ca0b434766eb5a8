//! Reference susceptibilities shared by the integration tests, generated at
//! 50 digits by `tests/oracle/susceptibility.py`.

#![allow(dead_code)]

/// sqrt(|Ω₂|² + |Ω₄|²) for controls 1.2e-9 and 1.8e-9 a.u. on the reference atom.
pub const OMEGA_EFF: f64 = 1.5755495833179123841e-9;

/// (ω, χ₁₁, χ₁₃, χ₁₁ + χ₁₃·ratio), all real in the lossless resonant limit.
pub const REFERENCE: [(f64, f64, f64, f64); 10] = [
    (1.5755495833179126e-18, 151695.61641025423, -114031.52473168553, -4.4099706541487995e-13),
    (1.5755495833179123e-15, 151.69561640996495, -114.03152473179958, -4.4099706541532088e-10),
    (1.5755495833179124e-12, 0.15169532710851594, -0.1140316387633243, -4.4099750641238632e-7),
    (1.5755495833179126e-11, 0.015166668337204994, -0.011404292902458799, -4.4104116953183314e-6),
    (3.938873958294781e-10, 0.00052963541257311678, -0.00048653450552185829, -0.00011759921744396798),
    (1.5739740337345944e-09, -0.14442651549540755, -0.057101385893987466, -0.22038822828886402),
    (1.57712513290123e-09, 0.14487455779231595, 0.05693033839309296, 0.22060872687674389),
    (4.726648749953737e-09, 0.00015905324884681937, 4.7513135304868978e-6, 0.00016537389953057997),
    (-7.877747916589562e-10, -0.00011052360015075803, 0.00030408406595116144, 0.00029399804360991995),
    (-1.5755495833179124e-13, -1.5169561351723973, 1.140315258720008, 4.4099706982485059e-8),
];
