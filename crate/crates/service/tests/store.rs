use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use efs_core::{empty_factsheet, import_card, Factsheet};
use efs_service::{Filter, Store, StoreError};

fn fixture(name: &str) -> Factsheet {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    import_card(&fs::read_to_string(path).unwrap()).unwrap().factsheet
}

fn loaded_store() -> (tempfile::TempDir, Store) {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    store.put("imagenet-2009", fixture("imagenet.tex"), None).unwrap();
    store.put("humaneval", fixture("humaneval.tex"), None).unwrap();
    store.put("mt-bench", fixture("mtbench.tex"), None).unwrap();
    (dir, store)
}

#[test]
fn first_write_is_revision_one_and_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let fs = fixture("imagenet.tex");
    let entry = store.put("imagenet-2009", fs.clone(), None).unwrap();
    assert_eq!(entry.revision, 1);
    assert_eq!(store.get("imagenet-2009").unwrap().factsheet, fs);
    assert!(dir.path().join("imagenet-2009.efs").is_file());
    assert!(dir.path().join(".meta/imagenet-2009.json").is_file());
}

#[test]
fn stale_revision_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let fs = fixture("mtbench.tex");
    store.put("mt-bench", fs.clone(), None).unwrap();
    assert_eq!(store.put("mt-bench", fs.clone(), Some(1)).unwrap().revision, 2);
    match store.put("mt-bench", fs.clone(), Some(1)) {
        Err(StoreError::Conflict { expected, current, .. }) => assert_eq!((expected, current), (1, 2)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(store.put("new-one", fs, Some(3)), Err(StoreError::Conflict { current: 0, .. })));
}

#[test]
fn bad_ids_and_missing_entries() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    assert!(matches!(store.put("Bad ID!", empty_factsheet(), None), Err(StoreError::InvalidId(_))));
    assert!(matches!(store.get("nope"), Err(StoreError::NotFound(_))));
    assert!(matches!(store.delete("nope", None), Err(StoreError::NotFound(_))));
}

#[test]
fn structurally_invalid_sheets_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let mut fs = empty_factsheet();
    fs.efs_version = "2.0".into();
    assert!(matches!(store.put("x", fs, None), Err(StoreError::Invalid(_))));
    assert!(store.list(None).is_empty());
}

#[test]
fn listing_and_filtering() {
    let (_dir, store) = loaded_store();
    let ids: Vec<String> = store.list(None).into_iter().map(|i| i.id).collect();
    assert_eq!(ids, ["humaneval", "imagenet-2009", "mt-bench"]);
    let filter: Filter = "M1:model_llm".parse().unwrap();
    let hits: Vec<String> = store.list(Some(&filter)).into_iter().map(|i| i.id).collect();
    assert_eq!(hits, ["mt-bench"]);
    let filter: Filter = "C7:selection".parse().unwrap();
    assert_eq!(store.list(Some(&filter))[0].id, "imagenet-2009");
    let item = &store.list(None)[2];
    assert_eq!(item.title.as_deref(), Some("MT-Bench"));
    assert!(item.completeness > 0.0 && item.completeness <= 1.0);
}

#[test]
fn reopening_recovers_revisions_and_drops_temporaries() {
    let (dir, store) = loaded_store();
    store.put("mt-bench", fixture("mtbench.tex"), Some(1)).unwrap();
    drop(store);
    fs::write(dir.path().join(".tmpabc123"), "#%EFS 1.0\n[context\n").unwrap();
    fs::write(dir.path().join(".meta/.tmpxyz"), "{").unwrap();

    let reopened = Store::open(dir.path()).unwrap();
    assert_eq!(reopened.get("mt-bench").unwrap().revision, 2);
    assert_eq!(reopened.get("humaneval").unwrap().revision, 1);
    assert_eq!(reopened.get("mt-bench").unwrap().factsheet, fixture("mtbench.tex"));
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn external_edits_bump_the_revision() {
    let (dir, store) = loaded_store();
    drop(store);
    let path = dir.path().join("humaneval.efs");
    let edited = fs::read_to_string(&path).unwrap().replace("HumanEval", "HumanEval+");
    fs::write(&path, edited).unwrap();
    let reopened = Store::open(dir.path()).unwrap();
    let entry = reopened.get("humaneval").unwrap();
    assert_eq!(entry.revision, 2);
    assert_eq!(entry.factsheet.context.title.as_deref(), Some("HumanEval+"));
}

#[test]
fn unparseable_documents_fail_the_startup_scan() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("broken.efs"), "not a factsheet").unwrap();
    assert!(matches!(Store::open(dir.path()), Err(StoreError::StorageFailure { .. })));
}

#[test]
fn delete_honours_revision() {
    let (_dir, store) = loaded_store();
    assert!(matches!(store.delete("humaneval", Some(7)), Err(StoreError::Conflict { .. })));
    store.delete("humaneval", Some(1)).unwrap();
    assert!(matches!(store.get("humaneval"), Err(StoreError::NotFound(_))));
    assert_eq!(store.list(None).len(), 2);
}

#[test]
fn two_instances_read_the_same_directory_alike() {
    let (dir, store) = loaded_store();
    let other = Store::open(dir.path()).unwrap();
    assert_eq!(store.list(None), other.list(None));
    for item in store.list(None) {
        assert_eq!(store.get(&item.id).unwrap(), other.get(&item.id).unwrap());
    }
}

#[test]
fn concurrent_writers_never_lose_a_revision() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::open(dir.path()).unwrap());
    let fs = fixture("humaneval.tex");
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let store = store.clone();
            let fs = fs.clone();
            std::thread::spawn(move || {
                for _ in 0..10 {
                    store.put("shared", fs.clone(), None).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    assert_eq!(store.get("shared").unwrap().revision, 80);
    assert_eq!(Store::open(dir.path()).unwrap().get("shared").unwrap().revision, 80);
}
