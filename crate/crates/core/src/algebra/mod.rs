//! Homogeneous polynomials, binary forms on lines, root finding and
//! conjugation bookkeeping.

mod binary;
mod conj;
mod intersect;
pub mod point;
mod poly;
pub mod roots;

pub use binary::{
    binary_roots, deflate, restrict_to_line, restrict_to_line_c, BinaryForm, Cp1Point, RootCluster, CHART_MERGE_RADIUS,
    MULTIPLICITY_RADIUS,
};
pub use conj::{classify_conjugates, conj_partition, upper_half, ConjClass};
pub use intersect::{intersect_curves, max_residual, newton_two_curves};
pub use point::{ProjPointC, ProjPointR};
pub use poly::{monomial_key, monomials, parse_monomial, HomPoly3, Monomial, PolySpec};

use num_complex::Complex64;

/// Value of `F` at a projective point.
pub fn eval_hom(f: &HomPoly3, p: &ProjPointC) -> Complex64 {
    f.eval(p.coords())
}

/// Gradient of `F` at a projective point.
pub fn gradient_hom(f: &HomPoly3, p: &ProjPointC) -> point::CVec3 {
    f.gradient(p.coords())
}

/// Third intersection of a cubic with the line through two of its real points.
pub fn third_collinear_point(f: &HomPoly3, a: &ProjPointR, b: &ProjPointR) -> crate::Result<ProjPointR> {
    if f.degree() != 3 {
        return Err(crate::Error::NotCubic);
    }
    let line = point::cross3(a.coords(), b.coords());
    if point::norm3(&line) < 1e-12 {
        return Err(crate::Error::InvalidInput("the two points coincide".into()));
    }
    let (u, v) = point::line_frame(&line);
    let mut form = restrict_to_line(f, &u, &v)?;
    for p in [a, b] {
        let c = p.coords();
        form = deflate(&form, &Cp1Point::real(point::dot3(c, &u), point::dot3(c, &v)), 1e-8)?;
    }
    // linear form b₀β + b₁α
    let k = form.coeffs();
    let (alpha, beta) = (-k[0].re, k[1].re);
    Ok(ProjPointR::new(point::add3(&point::scale3(&u, alpha), &point::scale3(&v, beta))))
}
