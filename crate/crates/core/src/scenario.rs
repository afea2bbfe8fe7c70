//! Deployment configuration, validation and seeded scenario generation.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerology::{numerology_params, MAX_NUMEROLOGY};
use crate::privacy;
use crate::rng::{self, streams};

/// Which LoS probability model to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LosMode {
    Mixed,
    Open,
}

/// Delay-locked-loop parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DllConfig {
    pub early_late_spacing_chips: f64,
    /// Front-end bandwidth; `None` means twice the signal bandwidth.
    pub frontend_bw_hz: Option<f64>,
    pub loop_bw_hz: f64,
    pub coherent_time_s: f64,
}

impl Default for DllConfig {
    fn default() -> Self {
        Self { early_late_spacing_chips: 0.02, frontend_bw_hz: None, loop_bw_hz: 0.2, coherent_time_s: 0.02 }
    }
}

/// Resolved DLL parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DllParams {
    pub early_late_spacing_chips: f64,
    pub frontend_bw_hz: f64,
    pub loop_bw_hz: f64,
    pub coherent_time_s: f64,
}

impl DllParams {
    /// Loop factor `a = B_L (1 - B_L T_coh / 2)`.
    pub fn loop_factor(&self) -> f64 {
        self.loop_bw_hz * (1.0 - 0.5 * self.loop_bw_hz * self.coherent_time_s)
    }
}

/// IRS panel settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct IrsConfig {
    pub position_m: [f64; 3],
    pub elements_h: usize,
    pub elements_v: usize,
    /// `None` means one codeword per element.
    pub codebook_size: Option<usize>,
    /// DFT oversampling factor per dimension.
    pub oversampling: usize,
}

impl Default for IrsConfig {
    fn default() -> Self {
        Self { position_m: [50.0, 50.0, 3.0], elements_h: 5, elements_v: 5, codebook_size: None, oversampling: 1 }
    }
}

/// Everything needed to build a [`Scenario`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    pub anchors: usize,
    pub users: usize,
    pub area_m: [f64; 2],
    pub ap_position_m: [f64; 3],
    pub anchor_height_m: f64,
    pub user_height_m: f64,
    pub irs: IrsConfig,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    pub comb_size: usize,
    pub numerology_count: u32,
    pub dll: DllConfig,
    pub noise_psd_w_per_hz: f64,
    pub symbol_variance: f64,
    pub los_mode: LosMode,
    pub p_max_ap_w: f64,
    pub p_max_anchor_w: f64,
    /// When set, maximum powers are quoted at this bandwidth and scale
    /// linearly with `bandwidth_hz`.
    pub power_reference_bandwidth_hz: Option<f64>,
    pub sensor_var_ap_m2: f64,
    pub sensor_var_m2: f64,
    pub dp_sensitivity_m: f64,
    pub eps_min: f64,
    pub delta_min: f64,
    /// Replaces the computed minimum anchor variance when set.
    pub min_anchor_var_override_m2: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            anchors: 6,
            users: 9,
            area_m: [100.0, 100.0],
            ap_position_m: [30.0, 30.0, 3.0],
            anchor_height_m: 3.0,
            user_height_m: 1.5,
            irs: IrsConfig::default(),
            bandwidth_hz: 4e6,
            carrier_hz: 3.5e9,
            comb_size: 4,
            numerology_count: 4,
            dll: DllConfig::default(),
            noise_psd_w_per_hz: 3.1812e-20,
            symbol_variance: 1.0,
            los_mode: LosMode::Open,
            p_max_ap_w: 0.22,
            p_max_anchor_w: 0.05,
            power_reference_bandwidth_hz: None,
            sensor_var_ap_m2: 0.0,
            sensor_var_m2: 0.001,
            dp_sensitivity_m: 0.1,
            eps_min: 1.0,
            delta_min: 0.1,
            min_anchor_var_override_m2: Some(0.005),
        }
    }
}

/// One anchor of a deployment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Anchor {
    pub position_m: [f64; 3],
    /// Location the anchor broadcasts (sensor error plus DP noise).
    pub broadcast_m: [f64; 3],
    pub is_ap: bool,
    pub sensor_var_m2: f64,
    pub p_max_w: f64,
    pub dp_sensitivity: f64,
    pub eps_min: f64,
    pub delta_min: f64,
    /// Minimum total location variance `xi^2_min`.
    pub min_var_m2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UserNode {
    pub position_m: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IrsPanel {
    pub position_m: [f64; 3],
    pub elements_h: usize,
    pub elements_v: usize,
    pub codebook_size: usize,
    pub oversampling: usize,
}

impl IrsPanel {
    pub fn elements(&self) -> usize {
        self.elements_h * self.elements_v
    }
}

/// A generated deployment. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    pub anchors: Vec<Anchor>,
    pub users: Vec<UserNode>,
    pub irs: IrsPanel,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    pub comb_size: usize,
    pub numerology_count: u32,
    pub dll: DllParams,
    pub noise_psd_w_per_hz: f64,
    pub symbol_variance: f64,
    pub los_mode: LosMode,
    pub area_m: [f64; 2],
}

impl Scenario {
    pub fn num_anchors(&self) -> usize {
        self.anchors.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn ap_index(&self) -> usize {
        self.anchors.iter().position(|a| a.is_ap).unwrap_or(0)
    }
}

fn finite_pos(p: &[f64]) -> bool {
    p.iter().all(|x| x.is_finite())
}

fn inside(area: [f64; 2], p: [f64; 3]) -> bool {
    p[0] >= 0.0 && p[0] <= area[0] && p[1] >= 0.0 && p[1] <= area[1]
}

/// All invariant violations of `config`; empty when it is usable.
pub fn validate_config(c: &ScenarioConfig) -> Vec<String> {
    let mut v = Vec::new();
    let mut check = |ok: bool, msg: &str| {
        if !ok {
            v.push(String::from(msg));
        }
    };
    check(c.anchors >= 1, "anchors must be at least 1");
    check(c.users >= 1, "users must be at least 1");
    check(c.area_m[0] > 0.0 && c.area_m[1] > 0.0 && finite_pos(&c.area_m), "area must be positive in both dimensions");
    check(c.bandwidth_hz > 0.0 && c.bandwidth_hz.is_finite(), "bandwidth_hz must be positive");
    check(c.carrier_hz > 0.0 && c.carrier_hz.is_finite(), "carrier_hz must be positive");
    check(c.comb_size >= 1, "comb_size must be at least 1");
    check(c.numerology_count >= 1, "numerology_count must be at least 1");
    check(c.numerology_count <= MAX_NUMEROLOGY + 1, "numerology_count must be at most 7");
    check(finite_pos(&c.ap_position_m) && inside(c.area_m, c.ap_position_m), "AP position must lie inside the area");
    check(finite_pos(&c.irs.position_m) && inside(c.area_m, c.irs.position_m), "IRS position must lie inside the area");
    check(c.anchor_height_m.is_finite() && c.user_height_m.is_finite(), "heights must be finite");
    check(c.irs.elements_h >= 1 && c.irs.elements_v >= 1, "IRS needs at least one element per dimension");
    check(c.irs.oversampling >= 1, "IRS oversampling must be at least 1");
    if let Some(n) = c.irs.codebook_size {
        let cap = c.irs.elements_h * c.irs.elements_v * c.irs.oversampling * c.irs.oversampling;
        check(n >= 1 && n <= cap, "IRS codebook_size must lie in [1, M0 * oversampling^2]");
    }
    let d = &c.dll;
    check(d.early_late_spacing_chips > 0.0, "early_late_spacing_chips must be positive");
    check(d.loop_bw_hz > 0.0 && d.coherent_time_s > 0.0, "loop_bw_hz and coherent_time_s must be positive");
    check(d.loop_bw_hz * (1.0 - 0.5 * d.loop_bw_hz * d.coherent_time_s) > 0.0, "DLL loop factor must be positive");
    if let Some(be) = d.frontend_bw_hz {
        check(be > c.bandwidth_hz, "frontend_bw_hz must exceed bandwidth_hz");
    }
    check(c.noise_psd_w_per_hz > 0.0, "noise_psd_w_per_hz must be positive");
    check(c.symbol_variance > 0.0, "symbol_variance must be positive");
    check(c.p_max_ap_w > 0.0 && c.p_max_anchor_w > 0.0, "p_max must be positive");
    if let Some(r) = c.power_reference_bandwidth_hz {
        check(r > 0.0, "power_reference_bandwidth_hz must be positive");
    }
    check(c.sensor_var_ap_m2 >= 0.0 && c.sensor_var_m2 >= 0.0, "sensor variances must be non-negative");
    check(c.dp_sensitivity_m > 0.0, "dp_sensitivity must be positive");
    check(c.eps_min > 0.0, "eps_min must be positive");
    check(c.delta_min > 0.0, "delta_min must be positive");
    check(c.delta_min < 0.8, "delta_min must be < 4/5");
    if let Some(x) = c.min_anchor_var_override_m2 {
        check(x >= 0.0, "min_anchor_var_override_m2 must be non-negative");
    }
    if c.bandwidth_hz > 0.0 && c.comb_size >= 1 && c.numerology_count >= 1 && c.numerology_count <= MAX_NUMEROLOGY + 1 {
        let top = c.numerology_count - 1;
        check(
            numerology_params(top, c.bandwidth_hz, c.comb_size).is_ok(),
            "bandwidth too narrow for one comb group at the largest numerology",
        );
    }
    v
}

/// Build a deployment: AP and IRS at their configured spots, other anchors
/// and all users uniform in the area, broadcast locations drawn at the
/// minimum anchor variance.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    let violations = validate_config(config);
    if !violations.is_empty() {
        return Err(Error::Config(violations.join("; ")));
    }
    let c = config;
    let mut rng = rng::stream(seed, streams::SCENARIO);
    let power_scale = c.power_reference_bandwidth_hz.map_or(1.0, |r| c.bandwidth_hz / r);
    let mut anchors = Vec::with_capacity(c.anchors);
    for j in 0..c.anchors {
        let is_ap = j == 0;
        let position_m = if is_ap {
            c.ap_position_m
        } else {
            [rng.random::<f64>() * c.area_m[0], rng.random::<f64>() * c.area_m[1], c.anchor_height_m]
        };
        let sensor_var_m2 = if is_ap { c.sensor_var_ap_m2 } else { c.sensor_var_m2 };
        let min_var_m2 = match c.min_anchor_var_override_m2 {
            Some(x) => libm::fmax(x, sensor_var_m2),
            None => privacy::min_anchor_variance(sensor_var_m2, c.eps_min, c.delta_min, c.dp_sensitivity_m)?,
        };
        anchors.push(Anchor {
            position_m,
            broadcast_m: position_m,
            is_ap,
            sensor_var_m2,
            p_max_w: power_scale * if is_ap { c.p_max_ap_w } else { c.p_max_anchor_w },
            dp_sensitivity: c.dp_sensitivity_m,
            eps_min: c.eps_min,
            delta_min: c.delta_min,
            min_var_m2,
        });
    }
    let users = (0..c.users)
        .map(|_| UserNode {
            position_m: [rng.random::<f64>() * c.area_m[0], rng.random::<f64>() * c.area_m[1], c.user_height_m],
        })
        .collect();
    for a in &mut anchors {
        let estimated = privacy::perturb_location(a.position_m, a.sensor_var_m2, &mut rng)?;
        let dp_var = libm::fmax(a.min_var_m2 - a.sensor_var_m2, 0.0);
        a.broadcast_m = privacy::perturb_location(estimated, dp_var, &mut rng)?;
    }
    let irs = IrsPanel {
        position_m: c.irs.position_m,
        elements_h: c.irs.elements_h,
        elements_v: c.irs.elements_v,
        codebook_size: c.irs.codebook_size.unwrap_or(c.irs.elements_h * c.irs.elements_v),
        oversampling: c.irs.oversampling,
    };
    Ok(Scenario {
        anchors,
        users,
        irs,
        bandwidth_hz: c.bandwidth_hz,
        carrier_hz: c.carrier_hz,
        comb_size: c.comb_size,
        numerology_count: c.numerology_count,
        dll: DllParams {
            early_late_spacing_chips: c.dll.early_late_spacing_chips,
            frontend_bw_hz: c.dll.frontend_bw_hz.unwrap_or(2.0 * c.bandwidth_hz),
            loop_bw_hz: c.dll.loop_bw_hz,
            coherent_time_s: c.dll.coherent_time_s,
        },
        noise_psd_w_per_hz: c.noise_psd_w_per_hz,
        symbol_variance: c.symbol_variance,
        los_mode: c.los_mode,
        area_m: c.area_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        assert!(validate_config(&ScenarioConfig::default()).is_empty());
    }

    #[test]
    fn rejects_bad_values() {
        let c = ScenarioConfig { delta_min: 0.9, ..Default::default() };
        assert!(validate_config(&c).iter().any(|m| m == "delta_min must be < 4/5"));
        let c = ScenarioConfig { comb_size: 0, ..Default::default() };
        assert!(!validate_config(&c).is_empty());
        let c = ScenarioConfig { area_m: [0.0, 0.0], ..Default::default() };
        assert!(matches!(generate_scenario(&c, 1), Err(Error::Config(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let c = ScenarioConfig::default();
        let a = generate_scenario(&c, 1).unwrap();
        assert_eq!(a, generate_scenario(&c, 1).unwrap());
        assert_ne!(a, generate_scenario(&c, 2).unwrap());
        assert_eq!(a.anchors.len(), 6);
        assert_eq!(a.users.len(), 9);
        assert_eq!(a.anchors.iter().filter(|x| x.is_ap).count(), 1);
        for u in &a.users {
            assert!(u.position_m[0] >= 0.0 && u.position_m[0] <= 100.0);
            assert_eq!(u.position_m[2], 1.5);
        }
    }
}
