//! Physical constants (CODATA 2018) and the atomic species table.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of a ^23Na atom in atomic mass units.
pub const MASS_NA23_U: f64 = 22.990;

/// Mass of a ^87Rb atom in atomic mass units.
pub const MASS_RB87_U: f64 = 86.909;

/// Background ^87Rb-^87Rb s-wave scattering length, m.
pub const A_RB: f64 = 5.3e-9;

/// Upper bound accepted for the gas parameter sqrt(n a_B^3).
///
/// With n = 1e20 m^-3 this is the a_B < 3 a_Rb working regime.
pub const DILUTENESS_BOUND: f64 = 0.02;

/// Resolve a species label to its mass in kg.
///
/// Accepts the common spellings `Na23`, `23Na`, `Na-23`, `Rb87`, `87Rb`, `Rb-87`
/// (case-insensitive).
pub fn species_mass_kg(label: &str) -> Option<f64> {
    let key: String = label
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    let amu = match key.as_str() {
        "na23" | "23na" => MASS_NA23_U,
        "rb87" | "87rb" => MASS_RB87_U,
        "k39" | "39k" => 38.964,
        "k41" | "41k" => 40.962,
        "li7" | "7li" => 7.016,
        "cs133" | "133cs" => 132.905,
        _ => return None,
    };
    Some(amu * ATOMIC_MASS_UNIT)
}
