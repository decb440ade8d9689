//! Built-in catalog of replacement tensors from the multi-drawing urn
//! literature, with their known constants for cross-checking.
//!
//! Two-colour two-draw tensors are written below in the conventional block
//! layout
//!
//! ```text
//! ( R(1,1,1) R(2,1,1) | R(1,2,1) R(2,2,1) )
//! ( R(1,1,2) R(2,1,2) | R(1,2,2) R(2,2,2) )
//! ```
//!
//! i.e. visual row = second draw, block = first draw (colours 1-based in the
//! comments, 0-based in code).

use crate::error::{Error, Result};
use crate::tensor::ReplacementTensor;

/// A named tensor plus the constants expected of it.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub tensor: ReplacementTensor,
    pub expected_sigma: f64,
    /// `max_{j,j'} sum_i |R(i,j) - R(i,j')|`.
    pub expected_e_lhs: f64,
    pub expected_e_holds: bool,
    /// Closed-form solutions of `sigma x = R(x, ..., x)` on the simplex,
    /// where known. Empty for the identity-like urn, whose fixed points fill
    /// the whole simplex.
    pub expected_fixed_points: Vec<Vec<f64>>,
}

/// Build a 2-colour 2-draw tensor from entries ordered
/// `(i, j, k)` lexicographically: `R(1,1,1), R(1,1,2), R(1,2,1), R(1,2,2),
/// R(2,1,1), ...`.
fn t22(entries: [f64; 8]) -> ReplacementTensor {
    ReplacementTensor::new(2, 2, entries.to_vec()).expect("catalog tensor is well-formed")
}

/// Affine two-draw family: first-colour additions `a_i = a0 + i h` depend
/// only on how many of the two drawn balls were of colour 2, and the column
/// is completed to mass `sigma` with colour-2 balls (Kuba-Mahmoud form).
/// Requires `0 <= a_i <= sigma` so the tensor is tenable.
pub fn affine(a0: f64, h: f64, sigma: f64) -> Result<ReplacementTensor> {
    let a = [a0, a0 + h, a0 + 2.0 * h];
    if a.iter().any(|&ai| ai < 0.0 || ai > sigma) {
        return Err(Error::Structural(format!(
            "affine family needs 0 <= a0 + i h <= sigma, got a = {a:?}, sigma = {sigma}"
        )));
    }
    let mut entries = vec![0.0; 8];
    for j in 0..2 {
        for k in 0..2 {
            let ai = a[j + k];
            entries[2 * j + k] = ai; // colour 1
            entries[4 + 2 * j + k] = sigma - ai; // colour 2
        }
    }
    Ok(ReplacementTensor::new(2, 2, entries)?.with_name(format!("affine({a0},{h},{sigma})")))
}

/// Three-draw two-colour tensor with strictly positive entries and two
/// simplex fixed points (Chang-Zhang example); sigma = 1.
fn chang_zhang() -> ReplacementTensor {
    // (i, j1, j2, j3) lexicographic, i slowest
    let entries = vec![
        0.872,
        2.416 / 3.0,
        2.416 / 3.0,
        0.616 / 3.0,
        2.416 / 3.0,
        0.616 / 3.0,
        0.616 / 3.0,
        0.072,
        0.128,
        0.584 / 3.0,
        0.584 / 3.0,
        2.384 / 3.0,
        0.584 / 3.0,
        2.384 / 3.0,
        2.384 / 3.0,
        0.928,
    ];
    ReplacementTensor::new(2, 3, entries).expect("catalog tensor is well-formed")
}

/// All catalog entries. The affine entry is the representative instance
/// `affine(1, 1, 5)`; other parameters go through [`affine`] directly.
pub fn entries() -> Vec<CatalogEntry> {
    let s2 = 2f64.sqrt();
    let s11 = 11f64.sqrt();
    vec![
        // ( 2 0 | 1 1 )   R(i,j,k) = 1[i=j] + 1[i=k]: one ball per drawn colour.
        // ( 1 1 | 0 2 )   The two-draw analogue of the identity urn; the limit
        //                 composition is random, so the ergodicity bound fails.
        CatalogEntry {
            name: "polya_identity".into(),
            tensor: t22([2.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 2.0]).with_name("polya_identity"),
            expected_sigma: 2.0,
            expected_e_lhs: 4.0,
            expected_e_holds: false,
            expected_fixed_points: vec![],
        },
        // every draw adds one ball of each colour
        CatalogEntry {
            name: "all_ones".into(),
            tensor: t22([1.0; 8]).with_name("all_ones"),
            expected_sigma: 2.0,
            expected_e_lhs: 0.0,
            expected_e_holds: true,
            expected_fixed_points: vec![vec![0.5, 0.5]],
        },
        CatalogEntry {
            name: "affine".into(),
            tensor: affine(1.0, 1.0, 5.0).expect("default affine instance is tenable"),
            expected_sigma: 5.0,
            expected_e_lhs: 4.0,
            expected_e_holds: true,
            expected_fixed_points: vec![vec![3.0 / 7.0, 4.0 / 7.0]],
        },
        // ( 1 2 | 1 2 )   order-dependent replacements; unique fixed point
        // ( 2 1 | 1 2 )   (sqrt(2)-1, 2-sqrt(2))
        CatalogEntry {
            name: "asym_sqrt2".into(),
            tensor: t22([1.0, 2.0, 1.0, 1.0, 2.0, 1.0, 2.0, 2.0]).with_name("asym_sqrt2"),
            expected_sigma: 3.0,
            expected_e_lhs: 2.0,
            expected_e_holds: true,
            expected_fixed_points: vec![vec![s2 - 1.0, 2.0 - s2]],
        },
        // ( 0 5 | 1 4 )
        // ( 2 3 | 2 3 )
        CatalogEntry {
            name: "asym_sqrt11".into(),
            tensor: t22([0.0, 2.0, 1.0, 2.0, 5.0, 3.0, 4.0, 3.0]).with_name("asym_sqrt11"),
            expected_sigma: 5.0,
            expected_e_lhs: 4.0,
            expected_e_holds: true,
            expected_fixed_points: vec![vec![s11 - 3.0, 4.0 - s11]],
        },
        // ( 1 2 | 2 1 )   non-affine; balanced with sigma = 3
        // ( 2 1 | 1 2 )
        CatalogEntry {
            name: "lms_ex1".into(),
            tensor: t22([1.0, 2.0, 2.0, 1.0, 2.0, 1.0, 1.0, 2.0]).with_name("lms_ex1"),
            expected_sigma: 3.0,
            expected_e_lhs: 2.0,
            expected_e_holds: true,
            expected_fixed_points: vec![vec![0.5, 0.5]],
        },
        // ( 4 0 | 1 3 )   two fixed points; the bound fails
        // ( 1 3 | 1 3 )
        CatalogEntry {
            name: "lms_ex2".into(),
            tensor: t22([4.0, 1.0, 1.0, 1.0, 0.0, 3.0, 3.0, 3.0]).with_name("lms_ex2"),
            expected_sigma: 4.0,
            expected_e_lhs: 6.0,
            expected_e_holds: false,
            expected_fixed_points: vec![vec![1.0 / 3.0, 2.0 / 3.0], vec![1.0, 0.0]],
        },
        // ( 7 1 | 3 5 )   unique fixed point but the bound fails
        // ( 3 5 | 1 7 )
        CatalogEntry {
            name: "lms_ex3".into(),
            tensor: t22([7.0, 3.0, 3.0, 1.0, 1.0, 5.0, 5.0, 7.0]).with_name("lms_ex3"),
            expected_sigma: 8.0,
            expected_e_lhs: 12.0,
            expected_e_holds: false,
            expected_fixed_points: vec![vec![1.0 - 1.0 / s2, 1.0 / s2]],
        },
        // ( 0 1 | 0 1 )   Li-Ng: unique fixed point (1/2, 1/2), yet power
        // ( 1 0 | 1 0 )   iteration oscillates; sigma = 1
        CatalogEntry {
            name: "li_ng".into(),
            tensor: t22([0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0]).with_name("li_ng"),
            expected_sigma: 1.0,
            expected_e_lhs: 2.0,
            expected_e_holds: false,
            expected_fixed_points: vec![vec![0.5, 0.5]],
        },
        CatalogEntry {
            name: "chang_zhang".into(),
            tensor: chang_zhang().with_name("chang_zhang"),
            expected_sigma: 1.0,
            expected_e_lhs: 1.6,
            expected_e_holds: false,
            expected_fixed_points: vec![vec![0.2, 0.8], vec![0.6, 0.4]],
        },
    ]
}

/// Look up a catalog entry by name. `affine(a0,h,sigma)` is parsed as a
/// parameterized constructor; bare `affine` is the (1, 1, 5) instance.
pub fn find(name: &str) -> Result<CatalogEntry> {
    if let Some(args) = name
        .strip_prefix("affine(")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "affine takes (a0, h, sigma), got `{name}`"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad affine parameter `{p}`: {e}")))
            })
            .collect::<Result<_>>()?;
        let tensor = affine(nums[0], nums[1], nums[2])?;
        let a0 = nums[0];
        let h = nums[1];
        let sigma = nums[2];
        let p = (a0 + 2.0 * h) / (sigma + 2.0 * h);
        return Ok(CatalogEntry {
            name: tensor.name().unwrap_or("affine").to_string(),
            tensor: tensor.clone(),
            expected_sigma: sigma,
            expected_e_lhs: tensor.validate().ergodicity_lhs,
            expected_e_holds: 4.0 * h.abs() < sigma,
            expected_fixed_points: vec![vec![p, 1.0 - p]],
        });
    }
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Parse(format!("unknown catalog entry `{name}`")))
}
