//! Regenerates the sample projects in `corpus/`.
//!
//! ```text
//! cargo run -p grkhs --example make_corpus [output-dir]
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use grkhs::groupoid::{
    disjoint_union, group_to_groupoid, pair_groupoid, FiniteGroupoid, GroupTable,
};
use grkhs::io::Project;
use grkhs::kernel::{
    block_assembly, character_kernel, convolution_kernel, kernel_combination,
    kernel_from_representation, kernel_product, KernelTerm,
};
use grkhs::representation::{
    counting_haar, glue_fields, glue_representations, left_regular_representation,
    right_regular_representation, scalar_representation, trivial_representation, HaarSide,
    UnitaryRepresentation, VectorField,
};
use grkhs::{CVector, Result, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn field(values: &[&[C64]]) -> VectorField {
    VectorField::new(
        values
            .iter()
            .map(|v| CVector::from_column_slice(v))
            .collect(),
    )
}

fn group(elements: &[&str]) -> Result<Arc<FiniteGroupoid>> {
    let mut t = GroupTable::cyclic(elements.len())?;
    t.elements = elements.iter().map(|s| s.to_string()).collect();
    Ok(Arc::new(group_to_groupoid(&t)?))
}

fn with_haar(p: &mut Project, g: &FiniteGroupoid) {
    p.set_haar("counting_left", counting_haar(g, HaarSide::Left));
    p.set_haar("counting_right", counting_haar(g, HaarSide::Right));
}

fn regular(g: &Arc<FiniteGroupoid>) -> Result<(UnitaryRepresentation, UnitaryRepresentation)> {
    Ok((
        left_regular_representation(g.clone(), &counting_haar(g, HaarSide::Left))?,
        right_regular_representation(g.clone(), &counting_haar(g, HaarSide::Right))?,
    ))
}

/// Character of a cyclic group sending the generator to `z`.
fn cyclic_character(g: &Arc<FiniteGroupoid>, z: C64) -> Result<UnitaryRepresentation> {
    let k: Vec<C64> = (0..g.arrow_count()).map(|i| z.powu(i as u32)).collect();
    scalar_representation(g.clone(), &k)
}

fn qubit_rep(g: &Arc<FiniteGroupoid>, lambda: C64) -> Result<UnitaryRepresentation> {
    let k: Vec<C64> = g
        .arrows()
        .map(|a| match g.arrow_label(a) {
            "(-,+)" => lambda,
            "(+,-)" => lambda.conj(),
            _ => c(1.0, 0.0),
        })
        .collect();
    scalar_representation(g.clone(), &k)
}

fn z2() -> Result<Project> {
    let g = group(&["e", "a"])?;
    let mut p = Project::with_groupoid(g.clone());
    with_haar(&mut p, &g);
    let (left, right) = regular(&g)?;
    let sign = cyclic_character(&g, c(-1.0, 0.0))?;
    let f = field(&[&[c(1.0, 0.0), c(2.0, 0.0)]]);
    let v_reg = field(&[&[c(1.0, 0.0), c(0.5, -0.5)]]);
    let v_sign = field(&[&[c(1.5, 0.5)]]);
    p.set_kernel(
        "conv",
        convolution_kernel(g.clone(), f.values()[0].as_slice(), 1.0)?,
    );
    p.set_kernel("regular", kernel_from_representation(&left, &v_reg)?);
    p.set_kernel("sign", kernel_from_representation(&sign, &v_sign)?);
    p.set_representation("left_regular", left);
    p.set_representation("right_regular", right);
    p.set_representation("sign", sign);
    p.set_vector_field("f", f);
    p.set_vector_field("v_reg", v_reg);
    p.set_vector_field("v_sign", v_sign);
    Ok(p)
}

fn z3() -> Result<Project> {
    let g = group(&["0", "1", "2"])?;
    let mut p = Project::with_groupoid(g.clone());
    with_haar(&mut p, &g);
    let (left, right) = regular(&g)?;
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let chi = cyclic_character(&g, omega)?;
    let delta = field(&[&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]]);
    let f = field(&[&[c(1.0, 0.5), c(-0.25, 1.0), c(0.75, 0.0)]]);
    let v_reg = field(&[&[c(0.5, 0.0), c(1.0, -1.0), c(0.0, 2.0)]]);
    let v_chi = field(&[&[c(0.0, 1.0)]]);
    p.set_kernel(
        "identity",
        convolution_kernel(g.clone(), delta.values()[0].as_slice(), 1.0)?,
    );
    p.set_kernel(
        "ones",
        character_kernel(g.clone(), &[c(1.0, 0.0); 3], 1e-12)?,
    );
    p.set_kernel(
        "conv_f",
        convolution_kernel(g.clone(), f.values()[0].as_slice(), 1.0)?,
    );
    p.set_kernel("regular", kernel_from_representation(&left, &v_reg)?);
    p.set_kernel("right_regular", kernel_from_representation(&right, &v_reg)?);
    p.set_kernel("chi", kernel_from_representation(&chi, &v_chi)?);
    p.set_representation("left_regular", left);
    p.set_representation("right_regular", right);
    p.set_representation("chi", chi);
    p.set_vector_field("delta", delta);
    p.set_vector_field("f", f);
    p.set_vector_field("v_reg", v_reg);
    p.set_vector_field("v_chi", v_chi);
    Ok(p)
}

fn z4() -> Result<Project> {
    let g = group(&["0", "1", "2", "3"])?;
    let mut p = Project::with_groupoid(g.clone());
    with_haar(&mut p, &g);
    let (left, right) = regular(&g)?;
    let chi = cyclic_character(&g, c(0.0, 1.0))?;
    let f = field(&[&[c(0.3, -0.2), c(1.0, 0.0), c(0.0, -0.7), c(-0.5, 0.4)]]);
    let v_reg = field(&[&[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.5), c(0.25, 0.25)]]);
    let v_chi = field(&[&[c(2.0, 0.0)]]);
    let conv = convolution_kernel(g.clone(), f.values()[0].as_slice(), 1.0)?;
    let reg = kernel_from_representation(&left, &v_reg)?;
    let combo = kernel_combination(&[
        KernelTerm {
            weight: 2.0,
            kernel: &conv,
            power: 1,
        },
        KernelTerm {
            weight: 0.5,
            kernel: &reg,
            power: 2,
        },
    ])?;
    p.set_kernel("conv_f", conv);
    p.set_kernel("regular", reg);
    p.set_kernel("chi", kernel_from_representation(&chi, &v_chi)?);
    p.set_kernel("combo", combo);
    p.set_representation("left_regular", left);
    p.set_representation("right_regular", right);
    p.set_representation("chi", chi);
    p.set_vector_field("f", f);
    p.set_vector_field("v_reg", v_reg);
    p.set_vector_field("v_chi", v_chi);
    Ok(p)
}

fn qubit() -> Result<Project> {
    let g = Arc::new(pair_groupoid(&["+", "-"])?);
    let mut p = Project::with_groupoid(g.clone());
    with_haar(&mut p, &g);
    let u = qubit_rep(&g, c(0.0, 1.0))?;
    let v = field(&[&[c(1.0, 0.0)], &[c(2.0, 0.0)]]);
    let (left, _) = regular(&g)?;
    let v_reg = field(&[&[c(1.0, 0.0), c(0.0, 1.0)], &[c(-0.5, 0.0), c(1.0, 1.0)]]);
    p.set_kernel("K", kernel_from_representation(&u, &v)?);
    p.set_kernel("regular", kernel_from_representation(&left, &v_reg)?);
    p.set_representation("U", u);
    p.set_representation("left_regular", left);
    p.set_vector_field("v", v);
    p.set_vector_field("v_reg", v_reg);
    Ok(p)
}

fn pair3() -> Result<Project> {
    let g = Arc::new(pair_groupoid(&["1", "2", "3"])?);
    let mut p = Project::with_groupoid(g.clone());
    with_haar(&mut p, &g);
    let trivial = trivial_representation(g.clone(), 2)?;
    let (left, right) = regular(&g)?;
    let v = field(&[
        &[c(1.0, 0.0), c(0.0, 1.0)],
        &[c(0.5, 0.5), c(-1.0, 0.0)],
        &[c(0.0, 0.0), c(2.0, -1.0)],
    ]);
    let v_reg = field(&[
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        &[c(0.0, 1.0), c(1.0, 1.0), c(0.0, 0.0)],
        &[c(0.25, 0.0), c(0.0, -0.5), c(1.0, 0.0)],
    ]);
    let kt = kernel_from_representation(&trivial, &v)?;
    let kr = kernel_from_representation(&left, &v_reg)?;
    let prod = kernel_product(&[&kt, &kr])?;
    p.set_kernel("trivial", kt);
    p.set_kernel("regular", kr);
    p.set_kernel(
        "ones",
        character_kernel(g.clone(), &[c(1.0, 0.0); 9], 1e-12)?,
    );
    p.set_kernel("product", prod);
    p.set_representation("trivial2", trivial);
    p.set_representation("left_regular", left);
    p.set_representation("right_regular", right);
    p.set_vector_field("v", v);
    p.set_vector_field("v_reg", v_reg);
    Ok(p)
}

fn union() -> Result<Project> {
    let a = Arc::new(pair_groupoid(&["+", "-"])?);
    let b = group(&["0", "1", "2"])?;
    let g = Arc::new(disjoint_union(&[&a, &b])?);
    let mut p = Project::with_groupoid(g.clone());
    with_haar(&mut p, &g);
    let ua = qubit_rep(&a, c(0.6, 0.8))?;
    let (ub, _) = regular(&b)?;
    let va = field(&[&[c(1.0, -1.0)], &[c(0.5, 0.0)]]);
    let vb = field(&[&[c(1.0, 0.0), c(0.0, 0.5), c(-0.5, 0.0)]]);
    let ka = kernel_from_representation(&ua, &va)?;
    let kb = kernel_from_representation(&ub, &vb)?;
    let u = glue_representations(g.clone(), &[&ua, &ub])?;
    let v = glue_fields(&[&va, &vb]);
    p.set_kernel("K", kernel_from_representation(&u, &v)?);
    p.set_kernel("blocks", block_assembly(g, &[&ka, &kb])?);
    p.set_representation("U", u);
    p.set_vector_field("v", v);
    Ok(p)
}

fn character() -> Result<Project> {
    let g = Arc::new(pair_groupoid(&["+", "-"])?);
    let mut p = Project::with_groupoid(g.clone());
    let theta = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let k = qubit_rep(&g, theta)?;
    let values: Vec<C64> = k.matrices().iter().map(|m| m[(0, 0)]).collect();
    let kc = character_kernel(g.clone(), &values, 1e-12)?;
    let sq = kernel_combination(&[KernelTerm {
        weight: 1.0,
        kernel: &kc,
        power: 2,
    }])?;
    p.set_kernel("char", kc);
    p.set_kernel("char_sq", sq);
    p.set_representation("k", k);
    Ok(p)
}

fn convolution() -> Result<Project> {
    let g = group(&["0", "1", "2", "3"])?;
    let mut p = Project::with_groupoid(g.clone());
    with_haar(&mut p, &g);
    let f = field(&[&[c(0.0, 1.0), c(0.5, 0.0), c(-0.25, -0.25), c(1.0, -0.5)]]);
    p.set_kernel(
        "conv",
        convolution_kernel(g, f.values()[0].as_slice(), 0.25)?,
    );
    p.set_vector_field("f", f);
    Ok(p)
}

type Builder = fn() -> Result<Project>;

fn main() -> Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus"));
    std::fs::create_dir_all(&dir)?;
    let projects: [(&str, Builder); 8] = [
        ("z2", z2),
        ("z3", z3),
        ("z4", z4),
        ("qubit", qubit),
        ("pair3", pair3),
        ("disjoint_union", union),
        ("character", character),
        ("convolution", convolution),
    ];
    for (name, build) in projects {
        let path = dir.join(format!("{name}.json"));
        build()?.save(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
