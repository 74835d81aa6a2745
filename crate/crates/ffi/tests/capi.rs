use std::ffi::CStr;
use std::ptr;

use hj_relax_ffi::*;

fn r(num: i64, den: i64) -> HjRational {
    HjRational { num, den }
}

/// Owns a handle for the duration of a test.
struct Pl(*mut HjPl);

impl Drop for Pl {
    fn drop(&mut self) {
        unsafe { hj_pl_free(self.0) }
    }
}

fn pl(points: &[(HjRational, HjRational)], left: HjRational, right: HjRational) -> Pl {
    let xs: Vec<HjRational> = points.iter().map(|p| p.0).collect();
    let ys: Vec<HjRational> = points.iter().map(|p| p.1).collect();
    let mut out = ptr::null_mut();
    let status = unsafe { hj_pl_new(xs.as_ptr(), ys.as_ptr(), xs.len(), left, right, &mut out) };
    assert_eq!(status, HjStatus::Ok);
    Pl(out)
}

fn abs() -> Pl {
    pl(&[(r(0, 1), r(0, 1))], r(-1, 1), r(1, 1))
}

fn w_shape() -> Pl {
    pl(
        &[(r(-1, 1), r(0, 1)), (r(0, 1), r(1, 1)), (r(1, 1), r(0, 1))],
        r(-2, 1),
        r(2, 1),
    )
}

fn constant(c: HjRational) -> Pl {
    pl(&[(r(0, 1), c)], r(0, 1), r(0, 1))
}

fn breakpoints(f: &Pl) -> Vec<(HjRational, HjRational)> {
    let mut n = 0;
    assert_eq!(unsafe { hj_pl_breakpoint_count(f.0, &mut n) }, HjStatus::Ok);
    (0..n)
        .map(|i| {
            let (mut x, mut y) = (r(0, 1), r(0, 1));
            assert_eq!(
                unsafe { hj_pl_breakpoint(f.0, i, &mut x, &mut y) },
                HjStatus::Ok
            );
            (x, y)
        })
        .collect()
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let mut needed = 0;
    assert_eq!(
        unsafe { hj_last_error(buf.as_mut_ptr(), buf.len(), &mut needed) },
        HjStatus::Ok
    );
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

type Operator = unsafe extern "C" fn(*const HjPl, *const HjPl, bool, *mut *mut HjPl) -> HjStatus;

unsafe extern "C" fn relax_ignoring_policy(
    h: *const HjPl,
    f0: *const HjPl,
    _: bool,
    out: *mut *mut HjPl,
) -> HjStatus {
    hj_relax(h, f0, out)
}

#[test]
fn counterexample_through_all_three_operators() {
    let (h, f0) = (abs(), constant(r(0, 1)));
    let ops: [Operator; 3] = [relax_ignoring_policy, hj_guerand, hj_godunov];
    for op in ops {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { op(h.0, f0.0, false, &mut out) }, HjStatus::Ok);
        let g = Pl(out);
        assert_eq!(breakpoints(&g), vec![(r(0, 1), r(0, 1))]);
        let (mut left, mut right) = (r(0, 1), r(0, 1));
        assert_eq!(
            unsafe { hj_pl_slopes(g.0, &mut left, &mut right) },
            HjStatus::Ok
        );
        assert_eq!((left, right), (r(-1, 1), r(0, 1)));
    }
}

#[test]
fn w_plateau_values() {
    let (h, f0) = (w_shape(), constant(r(1, 2)));
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { hj_godunov(h.0, f0.0, false, &mut out) },
        HjStatus::Ok
    );
    let g = Pl(out);
    assert_eq!(breakpoints(&g), vec![(r(-5, 4), r(1, 2))]);
    let mut v = r(0, 1);
    assert_eq!(unsafe { hj_pl_eval(g.0, r(-3, 2), &mut v) }, HjStatus::Ok);
    assert_eq!(v, r(1, 1));
    let mut x = 0.0;
    assert_eq!(unsafe { hj_pl_eval_f64(g.0, -2.0, &mut x) }, HjStatus::Ok);
    assert_eq!(x, 2.0);

    // Flat left tail: accepted by default, rejected under the strict policy.
    assert_eq!(
        unsafe { hj_guerand(h.0, f0.0, true, &mut out) },
        HjStatus::NotSemiCoercive
    );
    assert!(last_error().contains("semi-coercive"));
}

#[test]
fn neumann_dirichlet_and_flux() {
    let h = w_shape();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hj_neumann(h.0, r(1, 2), &mut out) }, HjStatus::Ok);
    let n = Pl(out);
    for (p, q) in [(-2, 1), (0, 1), (3, 4), (5, 1)] {
        let (mut a, mut b) = (r(0, 1), r(0, 1));
        assert_eq!(unsafe { hj_pl_eval(n.0, r(p, q), &mut a) }, HjStatus::Ok);
        assert_eq!(
            unsafe { hj_godunov_flux(h.0, r(1, 2), r(p, q), &mut b) },
            HjStatus::Ok
        );
        assert_eq!(a, b, "p = {p}/{q}");
    }
    let mut relaxed = ptr::null_mut();
    assert_eq!(unsafe { hj_relax(h.0, n.0, &mut relaxed) }, HjStatus::Ok);
    let relaxed = Pl(relaxed);
    let mut same = false;
    assert_eq!(
        unsafe { hj_pl_equal(relaxed.0, n.0, &mut same) },
        HjStatus::Ok
    );
    assert!(same);

    assert_eq!(
        unsafe { hj_dirichlet(h.0, r(0, 1), &mut out) },
        HjStatus::Ok
    );
    let d = Pl(out);
    assert_eq!(breakpoints(&d), vec![(r(-1, 1), r(0, 1))]);
}

#[test]
fn sub_and_super_bracket_the_boundary_function() {
    let h = w_shape();
    let f0 = pl(&[(r(0, 1), r(1, 1))], r(-1, 1), r(-1, 1));
    let (mut lo, mut hi) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { hj_sub_relax(h.0, f0.0, &mut lo) }, HjStatus::Ok);
    assert_eq!(unsafe { hj_super_relax(h.0, f0.0, &mut hi) }, HjStatus::Ok);
    let (lo, hi) = (Pl(lo), Pl(hi));
    for k in -12..=12 {
        let p = k as f64 / 4.0;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        unsafe {
            hj_pl_eval_f64(lo.0, p, &mut a);
            hj_pl_eval_f64(f0.0, p, &mut b);
            hj_pl_eval_f64(hi.0, p, &mut c);
        }
        assert!(a <= b && b <= c, "p = {p}");
    }
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    let xs = [r(0, 1)];
    let zero_den = [r(1, 0)];
    let status = unsafe {
        hj_pl_new(
            xs.as_ptr(),
            zero_den.as_ptr(),
            1,
            r(0, 1),
            r(0, 1),
            &mut out,
        )
    };
    assert_eq!(status, HjStatus::InvalidArgument);
    assert!(out.is_null());

    let unsorted = [r(1, 1), r(0, 1)];
    let status = unsafe {
        hj_pl_new(
            unsorted.as_ptr(),
            unsorted.as_ptr(),
            2,
            r(0, 1),
            r(0, 1),
            &mut out,
        )
    };
    assert_eq!(status, HjStatus::InvalidFunction);
    assert!(!last_error().is_empty());

    assert_eq!(
        unsafe { hj_pl_new(ptr::null(), ptr::null(), 1, r(0, 1), r(0, 1), &mut out) },
        HjStatus::NullPointer
    );

    let (h, rising) = (abs(), abs());
    assert_eq!(
        unsafe { hj_relax(h.0, rising.0, &mut out) },
        HjStatus::InvalidBoundary
    );
    let flat = constant(r(0, 1));
    assert_eq!(
        unsafe { hj_relax(flat.0, flat.0, &mut out) },
        HjStatus::InvalidHamiltonian
    );
    assert_eq!(
        unsafe { hj_relax(ptr::null(), flat.0, &mut out) },
        HjStatus::NullPointer
    );
    assert_eq!(
        unsafe { hj_relax(h.0, flat.0, ptr::null_mut()) },
        HjStatus::NullPointer
    );

    let mut x = r(0, 1);
    let mut y = r(0, 1);
    assert_eq!(
        unsafe { hj_pl_breakpoint(h.0, 5, &mut x, &mut y) },
        HjStatus::InvalidArgument
    );
    let mut v = 0.0;
    assert_eq!(
        unsafe { hj_pl_eval_f64(h.0, f64::NAN, &mut v) },
        HjStatus::InvalidArgument
    );

    let big = pl(&[(r(0, 1), r(i64::MAX, 1))], r(0, 1), r(i64::MAX, 1));
    assert_eq!(
        unsafe { hj_pl_eval(big.0, r(1, 1), &mut x) },
        HjStatus::Overflow
    );
    unsafe { hj_pl_free(ptr::null_mut()) };
}

#[test]
fn format_reports_needed_size() {
    let f = w_shape();
    let mut needed = 0;
    assert_eq!(
        unsafe { hj_pl_format(f.0, ptr::null_mut(), 0, &mut needed) },
        HjStatus::BufferTooSmall
    );
    let mut buf = vec![0 as std::ffi::c_char; needed];
    assert_eq!(
        unsafe { hj_pl_format(f.0, buf.as_mut_ptr(), buf.len(), &mut needed) },
        HjStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(text, "PL[-2 | (-1, 0) (0, 1) (1, 0) | 2]");

    let mut copy = ptr::null_mut();
    assert_eq!(unsafe { hj_pl_clone(f.0, &mut copy) }, HjStatus::Ok);
    let copy = Pl(copy);
    let mut same = false;
    assert_eq!(unsafe { hj_pl_equal(f.0, copy.0, &mut same) }, HjStatus::Ok);
    assert!(same);
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hj_relax.h"))
            .unwrap();
    for name in [
        "hj_pl_new",
        "hj_pl_clone",
        "hj_pl_free",
        "hj_pl_breakpoint_count",
        "hj_pl_breakpoint",
        "hj_pl_slopes",
        "hj_pl_eval",
        "hj_pl_eval_f64",
        "hj_pl_equal",
        "hj_pl_format",
        "hj_relax",
        "hj_sub_relax",
        "hj_super_relax",
        "hj_guerand",
        "hj_godunov",
        "hj_godunov_flux",
        "hj_neumann",
        "hj_dirichlet",
        "hj_last_error",
        "HJ_STATUS_NOT_SEMI_COERCIVE",
        "typedef struct HjPl HjPl;",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
