// Generated by the protocol buffer compiler.  DO NOT EDIT!
// source: google/protobuf/any.proto

package com.google.protobuf;

public final class AnyProto {
  private AnyProto() {}

  public static void registerAllExtensions(
      com.google.protobuf.ExtensionRegistryLite registry) {
  }

  static final com.google.protobuf.Descriptors.Descriptor
    internal_static_google_protobuf_Any_descriptor;

  public static com.google.protobuf.Descriptors.FileDescriptor getDescriptor() {
    return descriptor;
  }

  private static com.google.protobuf.Descriptors.FileDescriptor descriptor;

  static {
    java.lang.String[] descriptorData = {
      "\n\031google/protobuf/any.proto\022\017google.pro" +
      "tobufBv\n\023com.google.protobufB\010AnyProtoP\001"
    };
    descriptor = com.google.protobuf.Descriptors.FileDescriptor
        .internalBuildGeneratedFileFrom(descriptorData, new com.google.protobuf.Descriptors.FileDescriptor[] {});
    internal_static_google_protobuf_Any_descriptor = getDescriptor().getMessageTypes().get(0);
  }
}
