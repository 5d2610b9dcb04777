mod common;

#[test]
fn random_fans_and_dart_complete() {
    let runs = common::completion_suite(14, 6, 0x5EED);
    assert!(runs.len() >= 20);
    for r in &runs {
        assert!(r.error.is_none(), "{}: {:?}", r.label, r.error);
        assert!(r.seconds < 120.0, "{} took {:.1}s", r.label, r.seconds);
        assert!(r.output >= r.input);
    }
}
