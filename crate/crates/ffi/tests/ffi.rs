use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use pb_control_ffi::*;

const EXAMPLE: &str = "META\nkey;value\nbudget;2\nvote_type;approval\n\
PROJECTS\nproject_id;cost\nc1;1\nc2;2\np;1\n\
VOTES\nvoter_id;vote\n1;c1\n2;c1\n3;c1\n4;c2\n5;c2\n6;p\n";

fn parse(text: &str) -> *mut PbInstance {
    let text = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pb_instance_parse(text.as_ptr(), &mut h) }, PbStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = pb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn evaluate_example_one() {
    let h = parse(EXAMPLE);
    let mut m = 0usize;
    assert_eq!(unsafe { pb_instance_num_projects(h, &mut m) }, PbStatus::Ok);
    assert_eq!(m, 3);
    let mut funded = [9u8; 3];
    assert_eq!(unsafe { pb_evaluate(h, PbRule::GreedyAv, funded.as_mut_ptr(), 3) }, PbStatus::Ok);
    assert_eq!(funded, [1, 0, 1]);
    assert_eq!(unsafe { pb_evaluate(h, PbRule::GreedyAv, funded.as_mut_ptr(), 2) }, PbStatus::BufferTooSmall);
    unsafe { pb_instance_free(h) };
}

#[test]
fn control_and_probability() {
    let h = parse(EXAMPLE);
    let id = CString::new("c2").unwrap();
    let mut c2 = 0usize;
    assert_eq!(unsafe { pb_instance_project_index(h, id.as_ptr(), &mut c2) }, PbStatus::Ok);
    let mut res = PbControlResult { feasible: false, complete: false, weight: 0 };
    let mut witness = [0u8; 3];
    let st = unsafe {
        pb_control(
            h,
            PbRule::GreedyAv,
            PbGoal::Constructive,
            PbOperation::Delete,
            c2,
            1,
            ptr::null(),
            0,
            witness.as_mut_ptr(),
            3,
            &mut res,
        )
    };
    assert_eq!(st, PbStatus::Ok);
    assert!(res.feasible && res.complete);
    assert_eq!(res.weight, 1);
    assert_eq!(witness, [1, 0, 0]);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pb_win_probability(h, PbRule::GreedyAv, c2, 1, &mut s) }, PbStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "1/2");
    unsafe { pb_string_free(s) };
    unsafe { pb_instance_free(h) };
}

#[test]
fn errors_are_reported() {
    let bad =
        CString::new("META\nkey;value\nbudget;2\nvote_type;ordinal\nPROJECTS\nproject_id;cost\nVOTES\nvoter_id;vote\n")
            .unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pb_instance_parse(bad.as_ptr(), &mut h) }, PbStatus::ParseError);
    assert!(last_error().contains("ordinal"));
    assert_eq!(unsafe { pb_instance_parse(ptr::null(), &mut h) }, PbStatus::NullPointer);

    let h = parse(EXAMPLE);
    let mut res = PbControlResult { feasible: false, complete: false, weight: 0 };
    let st = unsafe {
        pb_control(
            h,
            PbRule::GreedyAv,
            PbGoal::Constructive,
            PbOperation::Add,
            1,
            1,
            ptr::null(),
            0,
            ptr::null_mut(),
            0,
            &mut res,
        )
    };
    assert_eq!(st, PbStatus::ControlError);
    assert!(last_error().contains("spoiler"));
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pb_win_probability(h, PbRule::Phragmen, 7, 1, &mut s) }, PbStatus::InvalidArgument);
    let unknown = CString::new("zz").unwrap();
    let mut idx = 0usize;
    assert_eq!(unsafe { pb_instance_project_index(h, unknown.as_ptr(), &mut idx) }, PbStatus::InvalidArgument);
    let mut m = 0usize;
    assert_eq!(unsafe { pb_instance_num_projects(h, &mut m) }, PbStatus::Ok);
    assert!(pb_last_error().is_null());
    unsafe { pb_instance_free(h) };
    unsafe { pb_instance_free(ptr::null_mut()) };
}

#[test]
fn write_round_trips() {
    let h = parse(EXAMPLE);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pb_instance_write(h, &mut s) }, PbStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { pb_string_free(s) };
    let back = pb_control::pabulib::parse(&text).unwrap();
    assert!(back.same_election(&pb_control::pabulib::parse(EXAMPLE).unwrap()));
    unsafe { pb_instance_free(h) };
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/pb_control.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    for f in ["pb_instance_parse", "pb_instance_free", "pb_control", "pb_win_probability", "pb_last_error"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, format!("#include \"{header}\"\nint main(void) {{ return PB_STATUS_OK; }}\n")).unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg(&src).status() {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; syntax check skipped"),
    }
}
