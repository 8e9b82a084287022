package com.google.common.truth;

import javax.annotation.processing.Generated;

@Generated("com.google.auto.value.processor.AutoValueProcessor")
final class AutoValue_ActualValueInference_SubjectEntry extends ActualValueInference.SubjectEntry {

  private final String actualValue;

  AutoValue_ActualValueInference_SubjectEntry(String actualValue) {
    if (actualValue == null) {
      throw new NullPointerException("Null actualValue");
    }
    this.actualValue = actualValue;
  }

  @Override
  String actualValue() {
    return actualValue;
  }
}
